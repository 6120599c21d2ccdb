#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "skyflux/core/bbox.hpp"
#include "skyflux/core/config.hpp"
#include "skyflux/core/frame.hpp"
#include "skyflux/core/homography.hpp"
#include "skyflux/core/image_io.hpp"

using namespace skyflux;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    fs::path p = fs::temp_directory_path() / "skyflux_test_core";
    fs::create_directories(p);
    return p;
}

} // namespace

TEST_CASE("frame construction enforces shape invariants") {
    Frame f(4, 3, 3);
    CHECK(f.data.size() == 4 * 3 * 3);
    CHECK(f.pixel_count() == 12);
    CHECK_THROWS_AS(Frame(0, 3, 1), DimensionMismatch);
    CHECK_THROWS_AS(Frame(4, 3, 2), DimensionMismatch);
}

TEST_CASE("load_frame scales 8-bit values to the unit interval") {
    fs::path dir = temp_dir();

    // 2x2 all-black image: every intensity is exactly 0.
    Frame black(2, 2, 1);
    fs::path black_path = dir / "black.png";
    save_frame(black, black_path.string());
    Frame loaded = load_frame(black_path.string());
    CHECK(loaded.width == 2);
    CHECK(loaded.height == 2);
    CHECK(loaded.channels == 1);
    for (double v : loaded.data)
        CHECK(v == 0.0);

    // Endpoint 255 -> 1.0 and midpoint 128 -> 128/255. The expected value
    // for the midpoint is the unit-interval division computed here, not a
    // literal copied from the loader.
    Frame gray(2, 2, 1);
    gray.at(0, 0) = 1.0;          // quantizes to 255
    gray.at(1, 0) = 128.0 / 255.0; // quantizes to 128
    fs::path gray_path = dir / "gray.png";
    save_frame(gray, gray_path.string());
    Frame back = load_frame(gray_path.string());
    CHECK(back.at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    const double oracle_mid = static_cast<double>(128) / static_cast<double>(255);
    CHECK(back.at(1, 0) == doctest::Approx(oracle_mid).epsilon(1e-12));
}

TEST_CASE("load_frame error paths") {
    CHECK_THROWS_AS(load_frame("/nonexistent/definitely_missing.png"), UnreadableImage);

    // 16-bit PNGs are rejected: the loader owns only the 8-bit contract.
    fs::path p = temp_dir() / "deep.png";
    std::vector<double> trace(16, 0.5);
    save_trace_png16(trace, 4, 4, p.string());
    CHECK_THROWS_AS(load_frame(p.string()), UnsupportedBitDepth);
}

TEST_CASE("png roundtrip is bit-exact on the 8-bit grid") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Frame f(9, 5, 3);
    for (double& v : f.data)
        v = uni(rng);

    fs::path p = temp_dir() / "roundtrip.png";
    save_frame(f, p.string());
    Frame a = load_frame(p.string());
    save_frame(a, p.string());
    Frame b = load_frame(p.string());

    REQUIRE(a.same_shape(b));
    for (size_t i = 0; i < a.data.size(); ++i)
        CHECK(a.data[i] == b.data[i]);

    // First load already equals the quantized original.
    Frame q = quantize8(f);
    for (size_t i = 0; i < q.data.size(); ++i)
        CHECK(a.data[i] == doctest::Approx(q.data[i]).epsilon(1e-12));

    for (double v : a.data) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("normalize_homography fixes the canonical scale") {
    Eigen::Matrix3d I = Eigen::Matrix3d::Identity();

    // 2*I collapses back to I; I is a fixed point.
    CHECK((normalize_homography(2.0 * I).matrix() - I).cwiseAbs().maxCoeff() == 0.0);
    CHECK((normalize_homography(I).matrix() - I).cwiseAbs().maxCoeff() == 0.0);

    // Direct arithmetic oracle: the largest-magnitude entry of M is -6,
    // so the canonical form is M / -6.
    Eigen::Matrix3d M;
    M << 0, 0, 3,
         -6, 0, 0,
         0, 1, 0;
    Eigen::Matrix3d expected = M / -6.0;
    Eigen::Matrix3d got = normalize_homography(M).matrix();
    CHECK((got - expected).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(got.cwiseAbs().maxCoeff() == doctest::Approx(1.0));
    CHECK(got(1, 0) == doctest::Approx(1.0)); // sign fixed to +1
}

TEST_CASE("normalize_homography is scale invariant") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    for (int it = 0; it < 50; ++it) {
        Eigen::Matrix3d H;
        do {
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c)
                    H(r, c) = uni(rng);
        } while (std::abs(H.determinant()) < 1e-3);
        double s = 0.0;
        while (std::abs(s) < 1e-3)
            s = uni(rng);
        Eigen::Matrix3d a = normalize_homography(H).matrix();
        Eigen::Matrix3d b = normalize_homography(s * H).matrix();
        CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("normalize_homography rejects singular input") {
    Eigen::Matrix3d Z = Eigen::Matrix3d::Zero();
    CHECK_THROWS_AS(normalize_homography(Z), SingularMatrix);
    Eigen::Matrix3d rank2;
    rank2 << 1, 2, 3,
             2, 4, 6,
             0, 0, 1;
    CHECK_THROWS_AS(normalize_homography(rank2), SingularMatrix);
}

TEST_CASE("homography apply performs the homogeneous divide") {
    Eigen::Matrix3d H;
    H << 2, 0, 1,
         0, 2, -1,
         0, 0, 2;
    Homography h(H);
    Eigen::Vector2d p = h.apply({3.0, 4.0});
    CHECK(p.x() == doctest::Approx(3.5));
    CHECK(p.y() == doctest::Approx(3.5));

    Homography inv = h.inverse();
    Eigen::Vector2d q = inv.apply(p);
    CHECK(q.x() == doctest::Approx(3.0));
    CHECK(q.y() == doctest::Approx(4.0));
}

TEST_CASE("bbox geometry") {
    BBox a{0, 0, 10, 10};
    BBox b{5, 5, 10, 10};
    CHECK(intersection_area(a, b) == doctest::Approx(25.0));
    CHECK(iou(a, b) == doctest::Approx(25.0 / 175.0));
    CHECK(iou(a, a) == doctest::Approx(1.0));

    BBox off{20, 20, 5, 5};
    CHECK(intersection_area(a, off) == 0.0);
    CHECK(iou(a, off) == 0.0);

    CHECK(a.contains(0, 0));
    CHECK(a.contains(10, 10));
    CHECK(!a.contains(10.01, 10));
    CHECK(a.cx() == doctest::Approx(5.0));

    BBox partly{-3, -3, 6, 6};
    BBox c = partly.clamped(10, 10);
    CHECK(c.x == 0.0);
    CHECK(c.y == 0.0);
    CHECK(c.w == doctest::Approx(3.0));
    CHECK(c.h == doctest::Approx(3.0));

    BBox outside{50, 50, 5, 5};
    BBox oc = outside.clamped(10, 10);
    CHECK(oc.area() == 0.0);
}

TEST_CASE("category names roundtrip") {
    for (Category c : {Category::MovingVehicle, Category::StationaryVehicleOrFalse,
                       Category::OtherMovingOrFalse, Category::Building,
                       Category::Vehicle, Category::GroundTruth})
        CHECK(category_from_string(to_string(c)) == c);
    CHECK_THROWS_AS(category_from_string("NotACategory"), ParseError);
}

TEST_CASE("sequence config validation") {
    SequenceConfig cfg;
    CHECK_NOTHROW(cfg.validate());

    SequenceConfig even = cfg;
    even.temporal_window = 4;
    CHECK_THROWS_AS(even.validate(), InvalidSpec);

    SequenceConfig tiny = cfg;
    tiny.temporal_window = 1;
    CHECK_THROWS_AS(tiny.validate(), InvalidSpec);

    SequenceConfig sigma = cfg;
    sigma.spatial_sigma = 0.0;
    CHECK_THROWS_AS(sigma.validate(), InvalidSpec);
}

TEST_CASE("mask raster io roundtrip") {
    BinaryMask m(6, 4);
    m.set(0, 0, true);
    m.set(5, 3, true);
    m.set(2, 1, true);

    fs::path p = temp_dir() / "mask.png";
    save_mask(m, p.string());
    BinaryMask back = load_mask(p.string());
    REQUIRE(back.same_shape(m));
    CHECK(back.bits == m.bits);
    CHECK(back.count() == 3);
}

TEST_CASE("mask boolean algebra") {
    BinaryMask a(3, 1), b(3, 1);
    a.set(0, 0, true);
    a.set(1, 0, true);
    b.set(1, 0, true);
    b.set(2, 0, true);
    CHECK((a & b).count() == 1);
    CHECK((a | b).count() == 3);
    CHECK((~a).count() == 1);
    CHECK(((a & b) | (a & ~b)).bits == a.bits);
}

TEST_CASE("trace png16 roundtrip preserves relative values") {
    std::vector<double> trace = {0.0, 1.25, 2.5, 5.0, 10.0, 0.5};
    fs::path p = temp_dir() / "trace.png";
    save_trace_png16(trace, 3, 2, p.string());
    int w = 0, h = 0;
    std::vector<double> back = load_trace_png16(p.string(), w, h);
    REQUIRE(w == 3);
    REQUIRE(h == 2);
    REQUIRE(back.size() == trace.size());
    // 16-bit quantization of max 10.0: absolute error below max/65535.
    for (size_t i = 0; i < trace.size(); ++i)
        CHECK(std::abs(back[i] - trace[i]) <= 10.0 / 65535.0 + 1e-9);
    CHECK(fs::exists(p.string() + ".scale.txt"));
}

TEST_CASE("jpeg encode decode stays in range and close to source") {
    Frame f(32, 32, 3);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x)
            for (int c = 0; c < 3; ++c)
                f.at(x, y, c) = (x + y + 8 * c) / 100.0;
    std::vector<uint8_t> bytes = encode_jpeg(f, 75);
    CHECK(!bytes.empty());
    Frame d = decode_image(bytes);
    REQUIRE(d.same_shape(f));
    double max_err = 0.0;
    for (size_t i = 0; i < d.data.size(); ++i) {
        CHECK(d.data[i] >= 0.0);
        CHECK(d.data[i] <= 1.0);
        max_err = std::max(max_err, std::abs(d.data[i] - f.data[i]));
    }
    // Smooth gradient: lossy error stays small but nonzero tolerance.
    CHECK(max_err < 0.1);
}

TEST_CASE("png encode is deterministic") {
    Frame f(16, 16, 3);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (double& v : f.data)
        v = uni(rng);
    std::vector<uint8_t> a = encode_png(f);
    std::vector<uint8_t> b = encode_png(f);
    CHECK(a == b);
    Frame d = decode_image(a);
    Frame q = quantize8(f);
    REQUIRE(d.same_shape(q));
    for (size_t i = 0; i < d.data.size(); ++i)
        CHECK(d.data[i] == doctest::Approx(q.data[i]).epsilon(1e-12));
}
