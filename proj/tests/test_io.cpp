#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <rhg/io.hpp>

#include <sstream>

using namespace rhg;

TEST_CASE("text edge format") {
    std::ostringstream os;
    TextEdgeWriter     w(os);
    w.edge(0, 1);
    w.edge(17, 400000000000ull);
    CHECK(os.str() == "0 1\n17 400000000000\n");
}

TEST_CASE("binary edge format round trip") {
    std::ostringstream os;
    {
        BinaryEdgeWriter w(os);
        w.edge(0, 1);
        w.edge(0xDEADBEEFull, 0x0123456789ABCDEFull);
    }
    const std::string blob = os.str();
    CHECK(blob.size() == 8 + 2 * 16);
    CHECK(blob.substr(0, 8) == "RHGE0001");
    // little-endian check on the first pair
    CHECK(static_cast<unsigned char>(blob[8]) == 0);
    CHECK(static_cast<unsigned char>(blob[16]) == 1);

    std::istringstream is(blob);
    const auto         edges = read_binary_edges(is);
    REQUIRE(edges.size() == 2);
    CHECK(edges[0] == std::pair<std::uint64_t, std::uint64_t>{0, 1});
    CHECK(edges[1] == std::pair<std::uint64_t, std::uint64_t>{0xDEADBEEFull, 0x0123456789ABCDEFull});
}

TEST_CASE("binary reader validates the magic") {
    std::istringstream is("NOTMAGIC");
    CHECK_THROWS_AS(read_binary_edges(is), std::runtime_error);

    std::istringstream truncated("RHGE0001\x01\x02");
    CHECK_THROWS_AS(read_binary_edges(truncated), std::runtime_error);
}
