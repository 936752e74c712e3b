#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mmdoppler/errors.hpp"
#include "mmdoppler/geometry.hpp"
#include "mmdoppler/oracle.hpp"
#include "mmdoppler/rng.hpp"
#include "mmdoppler/spectrum.hpp"
#include "mmdoppler/units.hpp"
#include "oracles.hpp"

using namespace mmdoppler;

namespace {

const MotionState kMotion = make_motion(kmh_to_mps(500.0), 28e9);
const double kFd = kMotion.f_dmax;

BeamGeometry geom_deg(double theta_v, double theta_rx) {
    return make_geometry(deg_to_rad(theta_rx), deg_to_rad(theta_rx), deg_to_rad(theta_v));
}

double total_mass(const Histogram& h) {
    double m = 0.0;
    for (std::size_t i = 0; i < h.densities.size(); ++i) {
        m += h.densities[i] * (h.edges[i + 1] - h.edges[i]);
    }
    return m;
}

double exact_l1(const BeamGeometry& g, std::size_t n, std::uint64_t seed) {
    const auto s = sample_doppler(g, kMotion, GainPattern::flat(), n, seed);
    const auto h = empirical_pdf(s, 200);
    return l1_distance(h, [&](double f) { return doppler_pdf(f, g, kMotion); }, kFd,
                       pdf_breakpoints(g, kMotion));
}

}  // namespace

TEST(Rng, UniformRangeAndSubstreams) {
    Stream a(substream_seed(1, 0));
    Stream b(substream_seed(1, 1));
    bool differ = false;
    for (int i = 0; i < 1000; ++i) {
        const double x = a.uniform();
        EXPECT_GE(x, 0.0);
        EXPECT_LT(x, 1.0);
        differ |= x != b.uniform();
    }
    EXPECT_TRUE(differ);
    EXPECT_NE(substream_seed(1, 0), substream_seed(2, 0));
}

TEST(SampleDoppler, RejectsZeroCount) {
    EXPECT_THROW(sample_doppler(geom_deg(0, 10), kMotion, GainPattern::flat(), 0, 1), DomainError);
}

TEST(SampleDoppler, VanishingBeamIsPureShift) {
    const auto g = make_geometry(1e-6, 1e-6, deg_to_rad(60.0));
    const auto s = sample_doppler(g, kMotion, GainPattern::flat(), 100000, 3);
    for (double f : s.values) {
        ASSERT_LE(std::abs(f - kFd * std::cos(deg_to_rad(60.0))), 1e-5 * kFd);
    }
}

TEST(SampleDoppler, HeadOnExtremes) {
    const auto g = geom_deg(0.0, 10.0);
    const auto s = sample_doppler(g, kMotion, GainPattern::flat(), 1'000'000, 11);
    const auto [mn, mx] = std::minmax_element(s.values.begin(), s.values.end());
    EXPECT_NEAR(*mx / kFd, 1.0, 1e-6);
    EXPECT_NEAR(*mn, kFd * std::cos(deg_to_rad(5.0)), 1e-4 * kFd);
}

TEST(SampleDoppler, BitExactPerSeedAndThreadCount) {
    const auto g = geom_deg(40.0, 20.0);
    const auto gain = GainPattern::parametric(deg_to_rad(15.0));
    const auto a = sample_doppler(g, kMotion, gain, 300'000, 42, 1);
    const auto b = sample_doppler(g, kMotion, gain, 300'000, 42, 4);
    const auto c = sample_doppler(g, kMotion, gain, 300'000, 42);
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(a.values, c.values);
    const auto d = sample_doppler(g, kMotion, gain, 300'000, 43, 1);
    EXPECT_NE(a.values, d.values);
}

TEST(SampleDoppler, SupportWithinResolution) {
    for (auto [v, w] : {std::pair{0.0, 10.0}, {90.0, 30.0}, {60.0, 5.0}, {178.0, 10.0}, {120.0, 90.0}}) {
        const auto g = geom_deg(v, w);
        const std::size_t n = 1'000'000;
        const auto s = sample_doppler(g, kMotion, GainPattern::flat(), n, 5);
        const auto sup = doppler_support(g, kMotion);
        const auto [mn, mx] = std::minmax_element(s.values.begin(), s.values.end());
        const double tol = kFd * (g.theta_rx / static_cast<double>(n)) * 5.0;
        EXPECT_LE(std::abs(*mn - sup.f_lo), tol) << v << " " << w;
        EXPECT_LE(std::abs(*mx - sup.f_hi), tol) << v << " " << w;
        for (double f : s.values) {
            ASSERT_LE(std::abs(f), kFd);
        }
    }
}

TEST(EmpiricalPdf, MassAndEdges) {
    const auto g = geom_deg(75.0, 10.0);
    const auto s = sample_doppler(g, kMotion, GainPattern::flat(), 123'457, 9);
    const auto h = empirical_pdf(s, 200);
    ASSERT_EQ(h.edges.size(), 201u);
    EXPECT_NEAR(total_mass(h), 1.0, 1e-12);
    const auto sup = doppler_support(g, kMotion);
    EXPECT_EQ(h.edges.front(), sup.f_lo);
    EXPECT_EQ(h.edges.back(), sup.f_hi);
    for (std::size_t i = 1; i < h.edges.size(); ++i) {
        EXPECT_LT(h.edges[i - 1], h.edges[i]);
    }
    for (double d : h.densities) {
        EXPECT_GE(d, 0.0);
    }
    EXPECT_EQ(std::accumulate(h.counts.begin(), h.counts.end(), std::uint64_t{0}), 123'457u);
    EXPECT_THROW(empirical_pdf(s, 1), DomainError);
}

TEST(EmpiricalPdf, JakesUShape) {
    const auto g = geom_deg(30.0, 360.0);
    const auto h = empirical_pdf(sample_doppler(g, kMotion, GainPattern::flat(), 1'000'000, 2), 200);
    EXPECT_GT(h.densities.front(), h.densities[100]);
    EXPECT_GT(h.densities.back(), h.densities[100]);
}

TEST(EmpiricalPdf, DegenerateSupportIsSingleBin) {
    DopplerSamples s;
    s.values = {5.0, 5.0, 5.0};
    s.support_lo = s.support_hi = 5.0;
    const auto h = empirical_pdf(s, 10);
    ASSERT_EQ(h.densities.size(), 1u);
    EXPECT_EQ(h.edges[0], 4.5);
    EXPECT_EQ(h.edges[1], 5.5);
    EXPECT_NEAR(total_mass(h), 1.0, 1e-12);
}

TEST(Histogram, MergeIsOrderIndependent) {
    const auto g = geom_deg(90.0, 10.0);
    const auto a = empirical_pdf(sample_doppler(g, kMotion, GainPattern::flat(), 50'000, 1), 50);
    const auto b = empirical_pdf(sample_doppler(g, kMotion, GainPattern::flat(), 70'000, 2), 50);
    const auto ab = merge_histograms(a, b);
    const auto ba = merge_histograms(b, a);
    EXPECT_EQ(ab.counts, ba.counts);
    EXPECT_EQ(ab.densities, ba.densities);
    EXPECT_NEAR(total_mass(ab), 1.0, 1e-12);
}

TEST(AnalyticHistogram, MatchesAngleDomainBinMasses) {
    for (auto [v, w] : {std::pair{0.0, 10.0}, {90.0, 30.0}, {170.0, 90.0}, {20.0, 360.0}, {3.0, 10.0},
                        {0.0, 1.0}, {180.0, 1.0}}) {
        const auto g = geom_deg(v, w);
        const auto sup = doppler_support(g, kMotion);
        std::vector<double> edges(41);
        for (std::size_t i = 0; i < edges.size(); ++i) {
            edges[i] = sup.f_lo + (sup.f_hi - sup.f_lo) * static_cast<double>(i) / 40.0;
        }
        const auto h = analytic_histogram([&](double f) { return doppler_pdf(f, g, kMotion); }, edges, kFd,
                                          pdf_breakpoints(g, kMotion));
        const auto want = oracle::bin_masses(g.theta_v, g.theta_rx, kFd, edges, [](double) { return 1.0; });
        for (std::size_t i = 0; i < want.size(); ++i) {
            EXPECT_NEAR(h.densities[i] * (edges[i + 1] - edges[i]), want[i], 2e-6) << v << " " << w << " " << i;
        }
    }
}

TEST(L1, SelfDistanceIsZero) {
    const auto g = geom_deg(50.0, 30.0);
    const auto sup = doppler_support(g, kMotion);
    std::vector<double> edges(201);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        edges[i] = sup.f_lo + (sup.f_hi - sup.f_lo) * static_cast<double>(i) / 200.0;
    }
    auto pdf = [&](double f) { return doppler_pdf(f, g, kMotion); };
    const auto br = pdf_breakpoints(g, kMotion);
    const auto h = analytic_histogram(pdf, edges, kFd, br);
    EXPECT_NEAR(l1_distance(h, pdf, kFd, br), 0.0, 1e-9);
}

TEST(L1, DecreasesWithSamples) {
    const auto g = geom_deg(90.0, 10.0);
    const double small = exact_l1(g, 10'000, 17);
    const double large = exact_l1(g, 1'000'000, 17);
    EXPECT_LT(large, small);
    EXPECT_LE(large, 0.02);
}

TEST(L1, SingleBranchFailsWhenSecondBranchInBeam) {
    for (auto [v, w] : {std::pair{0.0, 10.0}, {2.0, 30.0}, {180.0, 10.0}, {40.0, 90.0}}) {
        const auto g = geom_deg(v, w);
        const auto h = empirical_pdf(sample_doppler(g, kMotion, GainPattern::flat(), 1'000'000, 8), 200);
        const double l1 = l1_distance(
            h, [&](double f) { return doppler_pdf(f, g, kMotion, PdfMode::SingleBranch); }, kFd,
            pdf_breakpoints(g, kMotion));
        EXPECT_GT(l1, 0.02) << v << " " << w;
    }
}

TEST(GainThinning, EdgeToFlatRatioApproachesHalf) {
    // Abeam with hpbw equal to the beam: centre pre-image at full gain,
    // window-edge pre-images at half gain.
    const auto g = geom_deg(90.0, 10.0);
    const auto param = GainPattern::parametric(g.theta_rx);
    const std::size_t bins = 100;
    const auto hp = empirical_pdf(sample_doppler(g, kMotion, param, 4'000'000, 21), bins);
    const auto hf = empirical_pdf(sample_doppler(g, kMotion, GainPattern::flat(), 4'000'000, 22), bins);
    const double edge_p = 0.5 * (hp.densities.front() + hp.densities.back());
    const double edge_f = 0.5 * (hf.densities.front() + hf.densities.back());
    const double mid_p = 0.5 * (hp.densities[bins / 2 - 1] + hp.densities[bins / 2]);
    const double mid_f = 0.5 * (hf.densities[bins / 2 - 1] + hf.densities[bins / 2]);
    EXPECT_NEAR((edge_p / mid_p) / (edge_f / mid_f), 0.5, 0.03);
}

TEST(GainThinning, HistogramMatchesWeightedDensity) {
    const auto g = geom_deg(60.0, 20.0);
    const auto gain = GainPattern::parametric(deg_to_rad(12.0));
    const auto br = pdf_breakpoints(g, kMotion);
    auto psd = [&](double f) { return doppler_psd(f, g, kMotion, gain); };
    const double mass = integrate_psd(psd, -kFd, kFd, kFd, br);
    const auto h = empirical_pdf(sample_doppler(g, kMotion, gain, 1'000'000, 31), 200);
    EXPECT_LE(l1_distance(h, [&](double f) { return psd(f) / mass; }, kFd, br), 0.02);
}
