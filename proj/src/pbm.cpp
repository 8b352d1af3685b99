#include "inktrace/pbm.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace inktrace {

namespace {

[[noreturn]] void fail(const std::string& name, const std::string& what) {
    throw std::runtime_error("pbm: " + name + ": " + what);
}

// Skips whitespace and # comments, returns the next header token.
std::string next_token(const std::string& s, size_t& pos, const std::string& name) {
    while (pos < s.size()) {
        if (std::isspace(static_cast<unsigned char>(s[pos]))) {
            ++pos;
        } else if (s[pos] == '#') {
            while (pos < s.size() && s[pos] != '\n') ++pos;
        } else {
            break;
        }
    }
    size_t start = pos;
    while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos])) && s[pos] != '#')
        ++pos;
    if (start == pos) fail(name, "truncated header");
    return s.substr(start, pos - start);
}

int parse_dim(const std::string& tok, const std::string& name) {
    try {
        size_t used = 0;
        int v = std::stoi(tok, &used);
        if (used != tok.size() || v <= 0) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        fail(name, "bad dimension '" + tok + "'");
    }
}

}  // namespace

SkeletonImage parse_pbm(const std::string& bytes, const std::string& name) {
    size_t pos = 0;
    std::string magic = next_token(bytes, pos, name);
    if (magic != "P1" && magic != "P4") fail(name, "unsupported magic '" + magic + "'");
    int width = parse_dim(next_token(bytes, pos, name), name);
    int height = parse_dim(next_token(bytes, pos, name), name);

    SkeletonImage img = SkeletonImage::blank(width, height);
    if (magic == "P1") {
        int count = 0;
        for (; pos < bytes.size() && count < width * height; ++pos) {
            char c = bytes[pos];
            if (c == '0' || c == '1') {
                img.ink[count++] = (c == '1');
            } else if (c == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (!std::isspace(static_cast<unsigned char>(c))) {
                fail(name, std::string("unexpected character '") + c + "'");
            }
        }
        if (count != width * height) fail(name, "truncated pixel data");
    } else {
        // One whitespace byte after the header, then packed rows.
        if (pos >= bytes.size()) fail(name, "truncated pixel data");
        ++pos;
        size_t row_bytes = (width + 7) / 8;
        if (bytes.size() - pos < row_bytes * height) fail(name, "truncated pixel data");
        for (int r = 0; r < height; ++r) {
            for (int c = 0; c < width; ++c) {
                unsigned char byte = bytes[pos + r * row_bytes + c / 8];
                img.ink[r * width + c] = (byte >> (7 - c % 8)) & 1;
            }
        }
    }
    return img;
}

SkeletonImage read_pbm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_pbm(ss.str(), path);
}

std::string write_pbm_p1(const SkeletonImage& image) {
    std::string out = "P1\n" + std::to_string(image.width) + " " + std::to_string(image.height) +
                      "\n";
    out.reserve(out.size() + static_cast<size_t>(image.height) * (image.width + 1));
    for (int r = 0; r < image.height; ++r) {
        for (int c = 0; c < image.width; ++c)
            out.push_back(image.ink[r * image.width + c] ? '1' : '0');
        out.push_back('\n');
    }
    return out;
}

std::string write_pbm_p4(const SkeletonImage& image) {
    std::string out = "P4\n" + std::to_string(image.width) + " " + std::to_string(image.height) +
                      "\n";
    size_t row_bytes = (image.width + 7) / 8;
    std::string data(row_bytes * image.height, '\0');
    for (int r = 0; r < image.height; ++r)
        for (int c = 0; c < image.width; ++c)
            if (image.ink[r * image.width + c])
                data[r * row_bytes + c / 8] |= static_cast<char>(0x80 >> (c % 8));
    return out + data;
}

void write_pbm(const SkeletonImage& image, const std::string& path, bool binary) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    out << (binary ? write_pbm_p4(image) : write_pbm_p1(image));
}

}  // namespace inktrace
