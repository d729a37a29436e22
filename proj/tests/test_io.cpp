#include "ko/io.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace ko;
using io::Json;

namespace {

void check_same_f(const NonlinearitySpec& a, const NonlinearitySpec& b) {
    for (double t : {-7.0, -1.0, -0.25, 0.0, 0.3, 1.0, 4.0, 12.0}) CHECK(eval_f(a, t) == eval_f(b, t));
}

}  // namespace

TEST_CASE("format_double round-trips") {
    for (double v : {0.1, 1.0 / 3.0, 2.221441469079183, -1e-300, 6.02e23}) {
        CHECK(std::stod(io::format_double(v)) == v);
    }
    CHECK(io::format_double(INFINITY) == "inf");
}

TEST_CASE("spec JSON round-trips for every serializable family") {
    const auto base = NonlinearitySpec::exponential(1.5);
    const std::vector<NonlinearitySpec> specs{
        NonlinearitySpec::power_plus_eps(3, 1),
        base,
        NonlinearitySpec::affine(1, 1),
        NonlinearitySpec::affine(2, -3, 4.0),
        NonlinearitySpec::constant(0.5),
        NonlinearitySpec::tabulated({{0, 1}, {1, 2.5}, {3, 4}}),
        truncate_below(NonlinearitySpec::tabulated({{-1, 3}, {0, 1}, {2, 5}}), 1.0, {20.0, 500}),
        odd_extension(base, 0.3),
        scaled(NonlinearitySpec::power_plus_eps(2, 0.1), 0.5)};
    for (const auto& s : specs) {
        const Json j = io::spec_to_json(s);
        const auto back = io::spec_from_json(Json::parse(j.dump()));
        INFO(j.dump());
        CHECK(back.family_name() == s.family_name());
        CHECK(io::spec_to_json(back) == j);
        check_same_f(s, back);
    }
    CHECK(test::error_kind([] {
              io::spec_to_json(NonlinearitySpec::custom([](double) { return 1.0; }, "one"));
          }) == ErrorKind::Input);
}

TEST_CASE("spec JSON diagnostics name the offending token") {
    auto msg = [](const char* text) -> std::string {
        try {
            io::spec_from_json(Json::parse(text));
        } catch (const Error& e) {
            return e.what();
        }
        return {};
    };
    CHECK(msg(R"({"family":"quadratic"})").find("quadratic") != std::string::npos);
    CHECK(msg(R"({"family":"power_plus_eps","gamma":3})").find("eps") != std::string::npos);
    CHECK(msg(R"({"family":"constant","value":"x"})").find("value") != std::string::npos);
    CHECK(msg(R"({"family":"odd_extension","t0":0})").find("base") != std::string::npos);
    CHECK(msg(R"([1,2])").find("object") != std::string::npos);
}

TEST_CASE("matrix JSON") {
    const auto m = io::matrix_from_json(Json::parse(R"({"n":2,"entries":[1,2,2,3]})"));
    CHECK(m(0, 1) == 2.0);
    CHECK(io::matrix_from_json(io::matrix_to_json(m)) == m);
    CHECK(test::error_kind([] { io::matrix_from_json(Json::parse(R"({"n":2,"entries":[1,2,3,4]})")); }) ==
          ErrorKind::Input);
    CHECK(test::error_kind([] { io::matrix_from_json(Json::parse(R"({"n":2,"entries":[1,2,2]})")); }) ==
          ErrorKind::Input);
    CHECK(test::error_kind([] { io::matrix_from_json(Json::parse(R"({"entries":[1]})")); }) == ErrorKind::Input);
}

TEST_CASE("profile CSV round-trips at 17 significant digits") {
    ShootConfig cfg;
    cfg.c = 2;
    cfg.a = 0.1;
    for (const auto& f : {NonlinearitySpec::exponential(), NonlinearitySpec::constant(1)}) {
        const auto p = shoot(f, cfg);
        std::stringstream ss;
        io::write_profile_csv(ss, p);
        const std::string text = ss.str();
        CHECK(text.rfind("r,phi,dphi,ddphi\n", 0) == 0);
        CHECK(text.find(std::string("# status=") + to_string(p.status)) != std::string::npos);
        const auto back = io::read_profile_csv(ss);
        CHECK(back.status == p.status);
        CHECK(back.r_lo == p.r_lo);
        CHECK(back.r_hi == p.r_hi);
        CHECK(back.c == p.c);
        CHECK(back.a == p.a);
        REQUIRE(back.samples.size() == p.samples.size());
        for (std::size_t i = 0; i < p.samples.size(); ++i) {
            CHECK(back.samples[i].r == p.samples[i].r);
            CHECK(back.samples[i].phi == p.samples[i].phi);
            CHECK(back.samples[i].dphi == p.samples[i].dphi);
            CHECK(back.samples[i].ddphi == p.samples[i].ddphi);
        }
    }
}

TEST_CASE("profile CSV reader rejects malformed input") {
    std::istringstream no_header("1,2,3,4\n");
    CHECK(test::error_kind([&] { io::read_profile_csv(no_header); }) == ErrorKind::Input);
    std::istringstream short_row("r,phi,dphi,ddphi\n0,1,2\n# status=global R_lo=1 R_hi=inf c=1 a=0\n");
    CHECK(test::error_kind([&] { io::read_profile_csv(short_row); }) == ErrorKind::Input);
    std::istringstream no_trailer("r,phi,dphi,ddphi\n0,1,0,1\n");
    CHECK(test::error_kind([&] { io::read_profile_csv(no_trailer); }) == ErrorKind::Input);
}

TEST_CASE("KO verdict and certificate JSON round-trip") {
    const auto cert = dichotomy(NonlinearitySpec::power_plus_eps(3, 1), PPlusK{2}, 5);
    const auto j = io::certificate_to_json(cert);
    CHECK(j.at("verdict") == "NotExists");
    CHECK(j.at("residual_max").is_null());
    CHECK(j.at("profile_csv").is_null());
    const auto back = io::certificate_from_json(Json::parse(j.dump()));
    CHECK(back.verdict == cert.verdict);
    CHECK(*back.radius_bound == *cert.radius_bound);
    CHECK(back.ko.status == cert.ko.status);
    CHECK(back.ko.method == cert.ko.method);
    CHECK(back.ko.evidence == cert.ko.evidence);
    CHECK(back.c == cert.c);
    CHECK(back.note == cert.note);

    const auto num = classify_ko_numerical(NonlinearitySpec::constant(1));
    const auto kb = io::ko_from_json(Json::parse(io::ko_to_json(num).dump()));
    CHECK(kb.ladder == num.ladder);
    CHECK(kb.evidence.size() == num.evidence.size());
    for (const auto& [k, v] : num.evidence) CHECK(((std::isinf(v) && std::isinf(kb.evidence.at(k))) || kb.evidence.at(k) == v));
}

TEST_CASE("shoot config JSON overlays onto defaults") {
    const auto cfg = io::shoot_config_from_json(Json::parse(R"({"c":3,"r_max":4.5})"));
    CHECK(cfg.c == 3.0);
    CHECK(cfg.r_max == 4.5);
    CHECK(cfg.rel_tol == ShootConfig{}.rel_tol);
    const auto back = io::shoot_config_from_json(io::shoot_config_to_json(cfg));
    CHECK(back.c == cfg.c);
    CHECK(back.min_step == cfg.min_step);
}

TEST_CASE("plot data carries bound markers") {
    ShootConfig cfg;
    const auto f = NonlinearitySpec::exponential();
    const auto p = shoot(f, cfg);
    const auto rb = radius_bounds(f, 0, 1);
    std::ostringstream ss;
    io::write_plot_data(ss, p, &rb);
    const auto text = ss.str();
    CHECK(text.rfind("kind,r,phi\n", 0) == 0);
    CHECK(text.find("bound_lower,") != std::string::npos);
    CHECK(text.find("bound_upper,") != std::string::npos);
    CHECK(text.find("blowup_lo,") != std::string::npos);
}
