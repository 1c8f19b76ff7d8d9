#include "json_util.hpp"

#include <fstream>
#include <sstream>

namespace drlcheck {

Json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // nlohmann already reports line and column in what().
        throw ParseError(origin + ": " + e.what());
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot write " + path);
    out << content;
    if (!out)
        throw Error("short write to " + path);
}

Json parse_json_file(const std::string& path) {
    return parse_json_text(read_text_file(path), path);
}

const Json& require_field(const Json& obj, const std::string& key,
                          const std::string& origin) {
    if (!obj.is_object())
        throw ParseError(origin + ": expected an object with a \"" + key + "\" field");
    auto it = obj.find(key);
    if (it == obj.end())
        throw ParseError(origin + ": missing field \"" + key + "\"");
    return *it;
}

long require_int(const Json& v, const std::string& what, const std::string& origin) {
    if (!v.is_number_integer())
        throw ParseError(origin + ": " + what + " must be an integer");
    return v.get<long>();
}

double require_number(const Json& v, const std::string& what, const std::string& origin) {
    if (!v.is_number())
        throw ParseError(origin + ": " + what + " must be a number");
    return v.get<double>();
}

std::string require_string(const Json& v, const std::string& what,
                           const std::string& origin) {
    if (!v.is_string())
        throw ParseError(origin + ": " + what + " must be a string");
    return v.get<std::string>();
}

const Json& require_array(const Json& v, const std::string& what,
                          const std::string& origin) {
    if (!v.is_array())
        throw ParseError(origin + ": " + what + " must be an array");
    return v;
}

}
