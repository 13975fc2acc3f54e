#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "evorod/kinematics.hpp"

using namespace evorod;

namespace {

DirectorFrame random_rotation(std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const Vec3 axis(gauss(rng), gauss(rng), gauss(rng));
    std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
    return DirectorFrame::axis_angle(axis, angle(rng));
}

std::vector<DirectorFrame> helical_field(std::size_t nodes, double spacing) {
    // smooth non-planar rotation field for convergence studies
    std::vector<DirectorFrame> frames;
    frames.reserve(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        const double s = spacing * static_cast<double>(i);
        const Mat3 r = rotation_exp(Vec3(0.0, 0.0, 1.3 * s)) *
                       rotation_exp(Vec3(0.7 * std::sin(s), 0.0, 0.0)) *
                       rotation_exp(Vec3(0.0, 0.4 * s * s, 0.0));
        frames.emplace_back(r);
    }
    return frames;
}

double max_component_error(const std::vector<Vec3>& got, const std::vector<Vec3>& want,
                           std::size_t skip_ends) {
    double worst = 0.0;
    for (std::size_t i = skip_ends; i + skip_ends < got.size(); ++i) {
        worst = std::max(worst, (got[i] - want[i]).cwiseAbs().maxCoeff());
    }
    return worst;
}

}  // namespace

TEST_CASE("frames validate orthonormality and handedness") {
    Mat3 bad = Mat3::Identity();
    bad(0, 1) = 1e-6;
    CHECK_THROWS_AS(DirectorFrame{bad}, InvalidFrameError);

    Mat3 mirrored = Mat3::Identity();
    mirrored(2, 2) = -1.0;  // orthogonal, det = -1
    CHECK_THROWS_AS(DirectorFrame{mirrored}, InvalidFrameError);

    CHECK_NOTHROW(DirectorFrame{Mat3::Identity()});
}

TEST_CASE("renormalized repairs a drifted frame") {
    Mat3 drifted = rotation_exp(Vec3(0.3, -0.2, 0.9));
    drifted(0, 0) += 3e-9;
    CHECK_THROWS_AS(DirectorFrame{drifted}, InvalidFrameError);
    const DirectorFrame fixed = DirectorFrame(rotation_exp(Vec3(0.3, -0.2, 0.9))).renormalized();
    CHECK(DirectorFrame::defect(fixed.matrix()) <= 1e-15);
}

TEST_CASE("strain states reject non-positive stretch") {
    CHECK_THROWS_AS(StrainState(Vec3::Zero(), Vec3(0, 0, 0)), InvalidParameterError);
    CHECK_THROWS_AS(StrainState(Vec3::Zero(), Vec3(0, 0, -1)), InvalidParameterError);
    CHECK_THROWS_AS(NaturalState(Vec3::Zero(), Vec3(0.2, 0.0, -0.5)), InvalidParameterError);
    CHECK_NOTHROW(StrainState(Vec3::Zero(), Vec3(0.5, -0.5, 1e-8)));
}

TEST_CASE("darboux of a constant field vanishes") {
    std::vector<DirectorFrame> frames(5, DirectorFrame::identity());
    const auto u = darboux_of_rotation_field(frames, 0.1);
    for (const Vec3& ui : u) CHECK(ui.cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("darboux extraction needs three nodes and valid spacing") {
    std::vector<DirectorFrame> frames(2, DirectorFrame::identity());
    CHECK_THROWS_AS(darboux_of_rotation_field(frames, 0.1), InsufficientGridError);
    frames.assign(4, DirectorFrame::identity());
    CHECK_THROWS_AS(darboux_of_rotation_field(frames, 0.0), InvalidParameterError);
}

TEST_CASE("rotation reconstruction validates its input field") {
    std::vector<Vec3> bad(4, Vec3::Zero());
    bad[2][1] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(rotation_field_of_darboux(bad, DirectorFrame::identity(), 0.1),
                    InvalidParameterError);
    const std::vector<Vec3> none;
    CHECK_THROWS_AS(rotation_field_of_darboux(none, DirectorFrame::identity(), 0.1),
                    InsufficientGridError);
}

TEST_CASE("uniform twist about e3 and e1 is recovered at second order") {
    const double c = 1.7;
    for (int axis : {2, 0}) {
        Vec3 direction = Vec3::Zero();
        direction[axis] = 1.0;

        auto error_at = [&](std::size_t nodes) {
            const double h = 1.0 / static_cast<double>(nodes - 1);
            std::vector<DirectorFrame> frames;
            for (std::size_t i = 0; i < nodes; ++i) {
                frames.push_back(DirectorFrame::axis_angle(direction, c * h * static_cast<double>(i)));
            }
            const auto u = darboux_of_rotation_field(frames, h);
            double worst = 0.0;
            for (std::size_t i = 1; i + 1 < nodes; ++i) {
                worst = std::max(worst, (u[i] - c * direction).cwiseAbs().maxCoeff());
            }
            return worst;
        };

        const double coarse = error_at(33);
        const double fine = error_at(65);
        CHECK(coarse < 1e-2);
        CHECK(coarse / fine > 3.5);  // O(h^2)
    }
}

TEST_CASE("rotation field reconstruction from constant twist matches axis-angle") {
    const double c = 0.9;
    const std::size_t nodes = 41;
    const double h = 1.0 / static_cast<double>(nodes - 1);
    std::vector<Vec3> u(nodes, Vec3(0, 0, c));
    const auto frames = rotation_field_of_darboux(u, DirectorFrame::identity(), h);
    REQUIRE(frames.size() == nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        const Mat3 expected = rotation_exp(Vec3(0, 0, c * h * static_cast<double>(i)));
        CHECK((frames[i].matrix() - expected).cwiseAbs().maxCoeff() < 1e-13);
    }

    std::vector<Vec3> zero(nodes, Vec3::Zero());
    const auto trivial = rotation_field_of_darboux(zero, DirectorFrame::identity(), h);
    for (const auto& f : trivial) {
        CHECK((f.matrix() - Mat3::Identity()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("darboux/rotation round trip converges at order two") {
    auto roundtrip_error = [](std::size_t nodes) {
        const double h = 1.0 / static_cast<double>(nodes - 1);
        const auto frames = helical_field(nodes, h);
        const auto u = darboux_of_rotation_field(frames, h);
        const auto rebuilt = rotation_field_of_darboux(u, frames.front(), h);
        const auto u2 = darboux_of_rotation_field(rebuilt, h);
        return max_component_error(u2, u, 1);
    };
    const double coarse = roundtrip_error(65);
    const double fine = roundtrip_error(129);
    const double order = std::log2(coarse / fine);
    CHECK(order > 1.9);
}

TEST_CASE("reconstructed frames stay in SO(3) over many steps") {
    const std::size_t nodes = 10001;
    const double h = 1e-3;
    std::vector<Vec3> u(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        const double s = h * static_cast<double>(i);
        u[i] = Vec3(std::sin(3 * s), std::cos(2 * s), 0.5 + s);
    }
    const auto frames = rotation_field_of_darboux(u, DirectorFrame::identity(), h);
    double worst = 0.0;
    for (const auto& f : frames) worst = std::max(worst, DirectorFrame::defect(f.matrix()));
    CHECK(worst < 1e-10);
}

TEST_CASE("elastic decomposition at rest is trivial") {
    std::mt19937_64 rng(7);
    const DirectorFrame frame = random_rotation(rng);
    const Vec3 u(0.4, -0.2, 1.1);
    const Vec3 v(0.0, 0.1, 1.0);
    const auto split = elastic_decompose(StrainState(u, v), frame, NaturalState(u, v, frame));
    CHECK((split.rotation.matrix() - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(split.u.cwiseAbs().maxCoeff() < 1e-14);
    CHECK(split.v.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("identity natural frame leaves the current rotation as the elastic one") {
    const double theta = 0.8;
    const DirectorFrame current = DirectorFrame::axis_angle(Vec3(0, 0, 1), theta);
    const auto split = elastic_decompose(StrainState(Vec3::Zero(), Vec3(0, 0, 1)), current,
                                         NaturalState(Vec3::Zero(), Vec3(0, 0, 1),
                                                      DirectorFrame::identity()));
    CHECK((split.rotation.matrix() - current.matrix()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("elastic decomposition reconstructs the strains additively") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> positive(0.2, 2.0);
    for (int trial = 0; trial < 25; ++trial) {
        const DirectorFrame current = random_rotation(rng);
        const DirectorFrame natural = random_rotation(rng);
        const StrainState strain(Vec3(gauss(rng), gauss(rng), gauss(rng)),
                                 Vec3(gauss(rng), gauss(rng), positive(rng)));
        const NaturalState rest(Vec3(gauss(rng), gauss(rng), gauss(rng)),
                                Vec3(gauss(rng), gauss(rng), positive(rng)), natural);
        const auto split = elastic_decompose(strain, current, rest);

        // component split u_k = u_dk + u_ek and the world-vector identity
        CHECK((strain.u - rest.u_d - split.u).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((strain.v - rest.v_d - split.v).cwiseAbs().maxCoeff() < 1e-12);
        const Vec3 u_world = current.world_of(strain.u);
        const Vec3 rebuilt =
            split.rotation.matrix() * natural.world_of(rest.u_d) + split.u_world;
        CHECK((u_world - rebuilt).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("decomposition requires the natural frame") {
    CHECK_THROWS_AS(elastic_decompose(StrainState(Vec3::Zero(), Vec3(0, 0, 1)),
                                      DirectorFrame::identity(),
                                      NaturalState(Vec3::Zero(), Vec3(0, 0, 1))),
                    PreconditionError);
}

TEST_CASE("change of frame preserves director components and conjugates R_e") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> positive(0.2, 2.0);

    for (int trial = 0; trial < 25; ++trial) {
        const DirectorFrame current = random_rotation(rng);
        const DirectorFrame natural = random_rotation(rng);
        const Vec3 u(gauss(rng), gauss(rng), gauss(rng));
        const Vec3 v(gauss(rng), gauss(rng), positive(rng));
        const Vec3 u_d(gauss(rng), gauss(rng), gauss(rng));
        const Vec3 v_d(gauss(rng), gauss(rng), positive(rng));

        const ConfigurationPair pair{Configuration::from_components(natural, u_d, v_d),
                                     Configuration::from_components(current, u, v)};
        const DirectorFrame q = random_rotation(rng);
        const ConfigurationPair moved = apply_frame_change(q, pair);

        CHECK((moved.current.darboux_components() - u).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((moved.current.tangent_components() - v).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((moved.natural.darboux_components() - u_d).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((moved.natural.tangent_components() - v_d).cwiseAbs().maxCoeff() < 1e-12);

        const Mat3 re = current.matrix() * natural.matrix().transpose();
        const Mat3 re_moved = moved.current.frame.matrix() * moved.natural.frame.matrix().transpose();
        const Mat3 conjugated = q.matrix() * re * q.matrix().transpose();
        CHECK((re_moved - conjugated).cwiseAbs().maxCoeff() < 1e-12);
    }

    // identity change of frame is the identity map
    const ConfigurationPair pair{
        Configuration::from_components(DirectorFrame::identity(), Vec3(1, 2, 3), Vec3(0, 0, 1)),
        Configuration::from_components(DirectorFrame::identity(), Vec3(-1, 0, 2), Vec3(0, 0, 2))};
    const auto same = apply_frame_change(DirectorFrame::identity(), pair);
    CHECK((same.current.darboux - pair.current.darboux).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("long composition chains keep orthonormality") {
    std::mt19937_64 rng(11);
    DirectorFrame frame = DirectorFrame::identity();
    for (int i = 0; i < 10000; ++i) frame = frame * random_rotation(rng);
    CHECK(DirectorFrame::defect(frame.matrix()) < 1e-10);
}
