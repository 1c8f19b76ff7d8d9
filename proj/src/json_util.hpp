#pragma once

#include <json.hpp>

#include <string>

#include "drlcheck/errors.hpp"

// Internal helpers shared by the file-format code. Not installed.

namespace drlcheck {

using Json = nlohmann::ordered_json;

Json parse_json_text(const std::string& text, const std::string& origin);
Json parse_json_file(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Field accessors that raise ParseError with the document origin and a
// dotted path to the offending field.
const Json& require_field(const Json& obj, const std::string& key,
                          const std::string& origin);
long require_int(const Json& v, const std::string& what, const std::string& origin);
double require_number(const Json& v, const std::string& what, const std::string& origin);
std::string require_string(const Json& v, const std::string& what,
                           const std::string& origin);
const Json& require_array(const Json& v, const std::string& what,
                          const std::string& origin);

}
