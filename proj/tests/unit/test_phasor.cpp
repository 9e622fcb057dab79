#include <catch_amalgamated.hpp>

#include "fdpfc/phasor.hpp"

#include <cmath>
#include <complex>
#include <random>

using namespace fdpfc;
using Catch::Approx;

namespace {

// Oracle: sum of sinusoids evaluated pointwise, projected back onto sin/cos.
std::complex<double> project(double (*f)(double, void*), void* ctx, int n) {
    const int N = 4096;
    double s = 0.0;
    double c = 0.0;
    for (int i = 0; i < N; ++i) {
        const double th = 2.0 * M_PI * i / N;
        const double v = f(th, ctx);
        s += v * std::sin(n * th);
        c += v * std::cos(n * th);
    }
    return {2.0 * s / N, 2.0 * c / N};
}

}  // namespace

TEST_CASE("phase normalization stays in (-180, 180]") {
    CHECK(normalize_deg(180.0) == 180.0);
    CHECK(normalize_deg(-180.0) == 180.0);
    CHECK(normalize_deg(540.0) == Approx(180.0));
    CHECK(normalize_deg(-190.0) == Approx(170.0));
    CHECK(normalize_deg(0.0) == 0.0);
    CHECK(angle_diff_deg(179.0, -179.0) == Approx(-2.0));
    CHECK(angle_diff_deg(-174.0, 174.0) == Approx(12.0));
}

TEST_CASE("zero phasor has phase zero and negation rotates by 180") {
    const Phasor z = Phasor::polar(1.0, 0.0) + Phasor::polar(1.0, 180.0);
    CHECK(z.amplitude() < 1e-15);
    CHECK(z.phase_deg() == 0.0);

    const Phasor p = Phasor::polar(2.0, 30.0);
    const Phasor n = -p;
    CHECK(n.amplitude() == Approx(2.0));
    CHECK(n.phase_deg() == Approx(-150.0));
    CHECK(Phasor::polar(-3.0, 10.0).amplitude() == Approx(3.0));
    CHECK(Phasor::polar(-3.0, 10.0).phase_deg() == Approx(-170.0));
}

TEST_CASE("add examples") {
    const Phasor s = add(Phasor::polar(1.0, 0.0), Phasor::polar(1.0, -120.0));
    CHECK(s.amplitude() == Approx(1.0).epsilon(1e-12));
    CHECK(s.phase_deg() == Approx(-60.0).epsilon(1e-12));

    const Phasor g = Phasor::polar(282.84, 0.0) + Phasor::polar(83.28, 106.5);
    const std::complex<double> oracle =
        282.84 + std::polar(83.28, 106.5 * M_PI / 180.0);
    CHECK(g.amplitude() == Approx(std::abs(oracle)).epsilon(1e-12));
    CHECK(g.phase_deg() == Approx(std::arg(oracle) * 180.0 / M_PI).epsilon(1e-12));
    CHECK(g.amplitude() == Approx(271.2).margin(0.05));
    CHECK(g.phase_deg() == Approx(17.1).margin(0.05));
}

TEST_CASE("mismatched harmonic orders are rejected") {
    CHECK_THROWS_AS(Phasor::polar(1.0, 0.0, 1) + Phasor::polar(1.0, 0.0, 3), DomainError);
    CHECK_THROWS_AS(ThreePhaseSet::make(Phasor::polar(1.0, 0.0, 1), Phasor::polar(1.0, 0.0, 1),
                                        Phasor::polar(1.0, 0.0, 3)),
                    DomainError);
    CHECK_THROWS_AS(Phasor::polar(1.0, 0.0, 0), DomainError);
}

TEST_CASE("phasor matches the sin convention pointwise") {
    const double omega = 2.0 * M_PI * 50.0;
    const Phasor p = Phasor::polar(3.0, 40.0, 3);
    for (double t : {0.0, 1e-3, 3.7e-3, 0.0199}) {
        CHECK(p.at(omega, t) == Approx(3.0 * std::sin(3.0 * omega * t + 40.0 * M_PI / 180.0)));
    }
}

TEST_CASE("sum of sinusoids equals phasor sum (pointwise projection oracle)") {
    struct Ctx {
        double a1, p1, a2, p2;
    } ctx{2.0, 35.0, 1.3, -140.0};
    auto f = [](double th, void* v) {
        auto* c = static_cast<Ctx*>(v);
        return c->a1 * std::sin(th + c->p1 * M_PI / 180.0) +
               c->a2 * std::sin(th + c->p2 * M_PI / 180.0);
    };
    const auto z = project(f, &ctx, 1);
    const Phasor s = Phasor::polar(ctx.a1, ctx.p1) + Phasor::polar(ctx.a2, ctx.p2);
    CHECK(s.amplitude() == Approx(std::abs(z)).epsilon(1e-12));
    CHECK(s.phase_deg() == Approx(std::arg(z) * 180.0 / M_PI).epsilon(1e-10));
}

TEST_CASE("add is commutative and associative") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> amp(0.0, 10.0);
    std::uniform_real_distribution<double> ph(-180.0, 180.0);
    for (int i = 0; i < 1000; ++i) {
        const Phasor p = Phasor::polar(amp(rng), ph(rng));
        const Phasor q = Phasor::polar(amp(rng), ph(rng));
        const Phasor r = Phasor::polar(amp(rng), ph(rng));
        const double scale = p.amplitude() + q.amplitude() + r.amplitude();
        CHECK((p + q - (q + p)).amplitude() <= 1e-12 * scale);
        CHECK(((p + q) + r - (p + (q + r))).amplitude() <= 1e-12 * scale);
    }
}

TEST_CASE("line_from_phase on a balanced set") {
    const ThreePhaseSet s = ThreePhaseSet::balanced(1.0, 0.0);
    const ThreePhaseSet l = line_from_phase(s);
    CHECK(l.kind == SetKind::LineVoltages);
    CHECK(l.a.amplitude() == Approx(std::sqrt(3.0)));
    CHECK(l.a.phase_deg() == Approx(30.0));
    CHECK(l.b.amplitude() == Approx(std::sqrt(3.0)));
    CHECK(l.b.phase_deg() == Approx(-90.0));
    CHECK(l.c.amplitude() == Approx(std::sqrt(3.0)));
    CHECK(l.c.phase_deg() == Approx(150.0));
    CHECK(l.is_balanced_positive());
}

TEST_CASE("line_from_phase property: balanced in, sqrt3 and +30 out") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> amp(0.01, 100.0);
    std::uniform_real_distribution<double> ph(-180.0, 180.0);
    for (int i = 0; i < 500; ++i) {
        const double a = amp(rng);
        const double p = ph(rng);
        const ThreePhaseSet l = line_from_phase(ThreePhaseSet::balanced(a, p));
        REQUIRE(l.is_balanced_positive());
        CHECK(l.a.amplitude() / a == Approx(std::sqrt(3.0)).epsilon(1e-12));
        CHECK(angle_diff_deg(l.a.phase_deg(), p) == Approx(30.0).epsilon(1e-10));
    }
}

TEST_CASE("common-mode input cancels exactly") {
    const Phasor t = Phasor::polar(34.09, -123.4, 3);
    const ThreePhaseSet l = line_from_phase(ThreePhaseSet::make(t, t, t));
    CHECK(l.a.amplitude() == 0.0);
    CHECK(l.b.amplitude() == 0.0);
    CHECK(l.c.amplitude() == 0.0);
    CHECK(l.freq_multiple() == 3);

    const ThreePhaseSet z = line_from_phase(ThreePhaseSet::balanced(0.0, 0.0));
    CHECK(z.a.amplitude() == 0.0);
}

TEST_CASE("phase_from_line inverts line_from_phase for zero-sequence-free sets") {
    const ThreePhaseSet s = ThreePhaseSet::balanced(5.0, 12.0);
    const ThreePhaseSet back = phase_from_line(line_from_phase(s));
    CHECK((back.a - s.a).amplitude() < 1e-12);
    CHECK((back.b - s.b).amplitude() < 1e-12);
    CHECK((back.c - s.c).amplitude() < 1e-12);
}

TEST_CASE("balanced predicate rejects unbalanced and negative sequence sets") {
    CHECK(ThreePhaseSet::balanced(2.0, 17.0).is_balanced_positive());
    const ThreePhaseSet neg = ThreePhaseSet::make(Phasor::polar(1.0, 0.0), Phasor::polar(1.0, 120.0),
                                                  Phasor::polar(1.0, -120.0));
    CHECK_FALSE(neg.is_balanced_positive());
    const ThreePhaseSet unb = ThreePhaseSet::make(Phasor::polar(1.0, 0.0), Phasor::polar(1.1, -120.0),
                                                  Phasor::polar(1.0, 120.0));
    CHECK_FALSE(unb.is_balanced_positive());
}

TEST_CASE("connection group parsing") {
    CHECK(parse_connection_group("Dyn11") == ConnectionGroup::Dyn11);
    CHECK(parse_connection_group("D/Yn11") == ConnectionGroup::Dyn11);
    CHECK_THROWS_AS(parse_connection_group("Yy0"), DomainError);
    CHECK(to_string(ConnectionGroup::Dyn11) == "Dyn11");
}

TEST_CASE("reflect through a delta/wye transformer") {
    const double N = 220.0 / 127.0;
    const double U = 36.77;
    const double phi = -68.0;
    const TransformerSpec t{N, ConnectionGroup::Dyn11};

    // Phase set U∠φ on the delta side: its line set is √3U∠(φ+30), each
    // winding divides by N.
    const ThreePhaseSet y = reflect_through_transformer(ThreePhaseSet::balanced(U, phi), t,
                                                        Direction::PrimaryToSecondary);
    CHECK(y.kind == SetKind::PhaseVoltages);
    CHECK(y.a.amplitude() == Approx(std::sqrt(3.0) * U / N).epsilon(1e-12));
    CHECK(y.a.phase_deg() == Approx(phi + 30.0).epsilon(1e-12));
    const ThreePhaseSet yl = line_from_phase(y);
    CHECK(yl.a.amplitude() == Approx(3.0 * U / N).epsilon(1e-12));
    CHECK(yl.a.phase_deg() == Approx(phi + 60.0).epsilon(1e-12));

    const ThreePhaseSet zero = reflect_through_transformer(
        ThreePhaseSet::balanced(0.0, 0.0, SetKind::LineVoltages), TransformerSpec{1.0},
        Direction::PrimaryToSecondary);
    CHECK(zero.a.amplitude() == 0.0);

    CHECK_THROWS_AS(reflect_through_transformer(y, TransformerSpec{0.0},
                                                Direction::PrimaryToSecondary),
                    DomainError);
}

TEST_CASE("reflect round trip is the identity") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> amp(0.1, 400.0);
    std::uniform_real_distribution<double> ph(-180.0, 180.0);
    std::uniform_real_distribution<double> ratio(0.1, 10.0);
    for (int i = 0; i < 200; ++i) {
        const TransformerSpec t{ratio(rng)};
        const ThreePhaseSet lines = ThreePhaseSet::balanced(amp(rng), ph(rng), SetKind::LineVoltages);
        const ThreePhaseSet back = reflect_through_transformer(
            reflect_through_transformer(lines, t, Direction::PrimaryToSecondary), t,
            Direction::SecondaryToPrimary);
        CHECK(back.kind == SetKind::LineVoltages);
        const double a = lines.a.amplitude();
        CHECK((back.a - lines.a).amplitude() <= 1e-12 * a);
        CHECK((back.b - lines.b).amplitude() <= 1e-12 * a);
        CHECK((back.c - lines.c).amplitude() <= 1e-12 * a);
    }
}
