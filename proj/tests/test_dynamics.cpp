#include <catch2/catch_amalgamated.hpp>

#include "gscat/dynamics.hpp"
#include "gscat/smatrix.hpp"
#include "gallery.hpp"

using namespace gscat;

TEST_CASE("truncated Hamiltonian layout") {
    const auto g = gallery::g3();  // n=2, m=1
    const Matrix h = truncate(g, 4);
    REQUIRE(h.rows() == 1 + 2 * 4);
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    // Gadget block embedded verbatim.
    CHECK((h.topLeftCorner(3, 3) - g.hhat()).cwiseAbs().maxCoeff() == 0.0);
    // Path 0 hops: attachment (index 0) to x=2 (index 3), then 3-4, 4-5.
    CHECK(h(0, 3) == Complex(1.0, 0.0));
    CHECK(h(3, 4) == Complex(1.0, 0.0));
    CHECK(h(4, 5) == Complex(1.0, 0.0));
    // Path 1: attachment (index 1) to x=2 (index 6).
    CHECK(h(1, 6) == Complex(1.0, 0.0));
    CHECK(h(6, 7) == Complex(1.0, 0.0));
    // No cross-path hops.
    CHECK(h(5, 6) == Complex(0.0, 0.0));

    CHECK_THROWS_AS(truncate(g, 1), DomainError);

    // Bare path: truncation is the L-site path graph.
    const Matrix h0 = truncate(gallery::g0(), 5);
    REQUIRE(h0.rows() == 5);
    for (int i = 0; i + 1 < 5; ++i) CHECK(h0(i, i + 1) == Complex(1.0, 0.0));
    CHECK(h0.diagonal().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("full reflection from the bare attachment vertex") {
    WavePacketRun run;
    run.k0 = -M_PI / 2;
    run.L = 220;
    run.x0 = 80.0;
    run.sigma_x = 10.0;
    run = scatter_packet(gallery::g0(), run);
    REQUIRE(run.outgoing_probabilities.size() == 1);
    CHECK(run.outgoing_probabilities[0] == Catch::Approx(1.0).margin(2e-2));
    CHECK(run.norm_drift < 1e-10);
    CHECK(run.energy_drift < 1e-10);
    CHECK(run.leakage < 0.05);
}

TEST_CASE("full transmission across the joined pair of paths") {
    WavePacketRun run;
    run.k0 = -1.3;
    run.L = 220;
    run.x0 = 80.0;
    run = scatter_packet(gallery::g2(), run);
    REQUIRE(run.outgoing_probabilities.size() == 2);
    // |S_10| = 1: everything crosses to the other path.
    CHECK(run.outgoing_probabilities[1] == Catch::Approx(1.0).margin(2e-2));
    CHECK(run.outgoing_probabilities[0] < 2e-2);
    CHECK(run.norm_drift < 1e-10);
    CHECK(run.energy_drift < 1e-10);
}

TEST_CASE("outgoing probabilities track the S-matrix column") {
    const auto g = gallery::g1(3.0);
    WavePacketRun run;
    run.k0 = -2.0;
    run.L = 220;
    run.x0 = 80.0;
    run = scatter_packet(g, run);
    const auto sample = s_matrix(g, std::polar(1.0, run.k0));
    CHECK(run.outgoing_probabilities[0] ==
          Catch::Approx(std::norm(sample.s(0, 0))).margin(2e-2));
}

TEST_CASE("packet geometry is validated") {
    WavePacketRun run;
    run.L = 100;
    run.x0 = 90.0;  // 6 sigma would stick out past the boundary
    CHECK_THROWS_AS(scatter_packet(gallery::g0(), run), TruncationTooSmall);

    run = WavePacketRun{};
    run.k0 = 1.0;  // wrong sign: must be in (-pi, 0)
    run.L = 220;
    run.x0 = 80.0;
    CHECK_THROWS_AS(scatter_packet(gallery::g0(), run), DomainError);

    run = WavePacketRun{};
    run.j_in = 3;
    CHECK_THROWS_AS(scatter_packet(gallery::g0(), run), DomainError);
}

TEST_CASE("measuring too early reports an uncleared packet") {
    WavePacketRun run;
    run.k0 = -M_PI / 2;
    run.L = 220;
    run.x0 = 80.0;
    run.t = 80.0 / 2.0;  // packet is exactly at the gadget
    CHECK_THROWS_AS(scatter_packet(gallery::g0(), run), PacketNotCleared);
}
