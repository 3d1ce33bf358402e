#include <catch2/catch_amalgamated.hpp>

#include "gscat/completeness.hpp"
#include "gallery.hpp"

using namespace gscat;

TEST_CASE("bare path resolves the identity from scattering states alone") {
    const auto rep = completeness_defect(gallery::g0(), 5);
    CHECK(rep.max_deviation < 1e-7);
    CHECK(rep.window.size() == 5);
}

TEST_CASE("bound state carries the missing weight for the strong self-loop") {
    const auto g = gallery::g1(3.0);
    // Scattering states alone leave 8/9 of the attachment weight missing:
    // the integral of |<1,0|sc(k)>|^2/(2 pi) is 1/9.
    const Vertex v = Vertex::on_path(0, 1);
    const Complex diag = scattering_overlap_integral(g, v, v);
    CHECK(std::abs(diag - Complex(1.0 / 9.0, 0)) < 1e-7);
    // With the bound state included the defect closes.
    const auto rep = completeness_defect(g, 5);
    CHECK(rep.max_deviation < 1e-7);
}

TEST_CASE("confined and half-bound gadget: identity holds, halves excluded") {
    // Two pendants: one confined state contributes, the two half-bound
    // states (not normalizable) must not; the integral supplies the rest.
    const auto rep = completeness_defect(gallery::g4(), 4);
    CHECK(rep.max_deviation < 1e-5);
    CHECK(rep.window.size() == 6);
    REQUIRE(rep.excluded_energies.size() == 1);  // k = -pi/2 from the pair at -i
    CHECK(rep.excluded_energies[0] == Catch::Approx(-M_PI / 2).margin(1e-9));
}

TEST_CASE("two joined paths, window spans both paths") {
    const auto rep = completeness_defect(gallery::g2(), 3);
    CHECK(rep.max_deviation < 1e-6);
    CHECK(rep.window.size() == 6);
}

TEST_CASE("window layout and input validation") {
    CHECK_THROWS_AS(completeness_defect(gallery::g0(), 1), DomainError);
    const auto rep = completeness_defect(gallery::g3(), 2);
    CHECK(rep.window.size() == 5);  // 1 internal + 2 paths x 2
    CHECK(rep.window[0].kind == Vertex::Kind::Internal);
    CHECK(rep.max_deviation < 1e-6);
}
