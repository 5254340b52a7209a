#pragma once

// Edge stream formats. Text: one `u v` pair per line, u < v, decimal.
// Binary: 8-byte magic "RHGE0001" followed by little-endian unsigned 64-bit
// pairs, no length prefix.

#include <array>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rhg {

inline constexpr char binary_edge_magic[8] = {'R', 'H', 'G', 'E', '0', '0', '0', '1'};

class TextEdgeWriter {
public:
    explicit TextEdgeWriter(std::ostream& os) : os_(os) {}

    void edge(std::uint64_t u, std::uint64_t v) {
        char* p = buf_.data();
        p       = append(p, u);
        *p++    = ' ';
        p       = append(p, v);
        *p++    = '\n';
        os_.write(buf_.data(), p - buf_.data());
    }

    void vertex(std::uint64_t, double, double) {}

private:
    static char* append(char* p, std::uint64_t x) {
        char  tmp[20];
        char* t = tmp;
        do {
            *t++ = static_cast<char>('0' + x % 10);
            x /= 10;
        } while (x);
        while (t != tmp)
            *p++ = *--t;
        return p;
    }

    std::ostream&        os_;
    std::array<char, 44> buf_{};
};

class BinaryEdgeWriter {
public:
    explicit BinaryEdgeWriter(std::ostream& os) : os_(os) { os_.write(binary_edge_magic, 8); }

    void edge(std::uint64_t u, std::uint64_t v) {
        char buf[16];
        put_le(buf, u);
        put_le(buf + 8, v);
        os_.write(buf, 16);
    }

    void vertex(std::uint64_t, double, double) {}

private:
    static void put_le(char* p, std::uint64_t x) {
        for (int i = 0; i < 8; ++i)
            p[i] = static_cast<char>((x >> (8 * i)) & 0xff);
    }

    std::ostream& os_;
};

inline std::vector<std::pair<std::uint64_t, std::uint64_t>> read_binary_edges(std::istream& is) {
    char magic[8];
    is.read(magic, 8);
    if (is.gcount() != 8 || std::memcmp(magic, binary_edge_magic, 8) != 0)
        throw std::runtime_error("read_binary_edges: bad magic");
    std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;
    char buf[16];
    for (;;) {
        is.read(buf, 16);
        if (is.gcount() == 0)
            break;
        if (is.gcount() != 16)
            throw std::runtime_error("read_binary_edges: truncated pair");
        auto get_le = [&](const char* p) {
            std::uint64_t x = 0;
            for (int i = 7; i >= 0; --i)
                x = (x << 8) | static_cast<unsigned char>(p[i]);
            return x;
        };
        edges.emplace_back(get_le(buf), get_le(buf + 8));
    }
    return edges;
}

} // namespace rhg
