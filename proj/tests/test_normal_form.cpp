#include <cmath>
#include <random>

#include "dioph/errors.hpp"
#include "dioph/normal_form.hpp"
#include "doctest.h"

using namespace dioph;

namespace {

// psi1 = u+v, psi2 = v+t, psi3 = u+t, psi4 = u+v+t on variables (t,u,v).
FormSystem ap_system() {
    return FormSystem::from_rows({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}, {1, 1, 1}});
}

// The reparametrized system on (t,u,v,w) that is normal for every i.
FormSystem ap_system_extended() {
    return FormSystem::from_rows(
        {{0, 1, 1, 2}, {1, 0, 1, -1}, {1, 1, 0, -1}, {1, 1, 1, 0}});
}

} // namespace

TEST_CASE("is_normal_form: the AP system is normal wrt psi4 but not psi3") {
    FormSystem psi = ap_system();
    NormalFormWitness w4 = is_normal_form(psi, 3);
    CHECK(w4.is_normal);
    CHECK(w4.witness == std::vector<std::size_t>{0, 1, 2});
    CHECK_FALSE(is_normal_form(psi, 2).is_normal);
}

TEST_CASE("is_normal_form: the displayed extension is normal for every i") {
    FormSystem psi = ap_system_extended();
    for (std::size_t i = 0; i < 4; ++i) CHECK(is_normal_form(psi, i).is_normal);
}

TEST_CASE("is_normal_form: single form system") {
    FormSystem psi = FormSystem::from_rows({{0.0, 2.0, 0.0}});
    NormalFormWitness w = is_normal_form(psi, 0);
    CHECK(w.is_normal);
    CHECK(w.witness == std::vector<std::size_t>{1});
}

TEST_CASE("cs_complexity: the AP system has finite small complexity") {
    ComplexityReport rep = cs_complexity(ap_system(), 0.1);
    CHECK(rep.finite());
    CHECK(rep.s >= 1);
    CHECK(rep.s <= 2); // m - 2
    for (std::size_t i = 0; i < 4; ++i) CHECK(rep.s_i[i] <= 2);
}

TEST_CASE("cs_complexity: duplicated forms are infinitely complex") {
    FormSystem psi = FormSystem::from_rows({{1, 0, 0}, {1, 0, 0}, {0, 1, 0}});
    ComplexityReport rep = cs_complexity(psi, 0.01);
    CHECK_FALSE(rep.finite());
}

TEST_CASE("cs_complexity: margin monotone under refinement") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<std::vector<double>> rows(4, std::vector<double>(3));
        for (auto& r : rows)
            for (auto& v : r) v = dist(rng);
        FormSystem psi;
        try {
            psi = FormSystem::from_rows(rows);
        } catch (const Error&) {
            continue;
        }
        // Coarsening a part never increases the residual.
        double merged = partition_residual(psi, 3, {0, 1, 2});
        double part_a = partition_residual(psi, 3, {0, 1});
        double part_b = partition_residual(psi, 3, {2});
        CHECK(merged <= std::min(part_a, part_b) + 1e-12);
    }
}

TEST_CASE("extend_normal_form: AP system at i=3 (already normal) passes") {
    FormSystem psi = ap_system();
    ComplexityReport rep = cs_complexity(psi, 0.1);
    REQUIRE(rep.finite());
    NormalFormExtension ext = extend_normal_form(psi, 3, rep.best_partition[3]);
    CHECK(ext.witness.is_normal);
}

TEST_CASE("extend_normal_form: AP system at i=2 yields a valid extension") {
    FormSystem psi = ap_system();
    ComplexityReport rep = cs_complexity(psi, 0.1);
    REQUIRE(rep.finite());
    NormalFormExtension ext = extend_normal_form(psi, 2, rep.best_partition[2]);
    CHECK(ext.witness.is_normal);

    // Reparametrization soundness: psi'(u,w) = psi(u + sum w_k f_k) to 1e-10.
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    const std::size_t n = psi.n_vars;
    const std::size_t s1 = ext.shift_vectors.size();
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> u(n), w(s1);
        for (auto& v : u) v = dist(rng);
        for (auto& v : w) v = dist(rng);
        std::vector<double> shifted(n);
        for (std::size_t c = 0; c < n; ++c) {
            shifted[c] = u[c];
            for (std::size_t kk = 0; kk < s1; ++kk) shifted[c] += w[kk] * ext.shift_vectors[kk][c];
        }
        for (std::size_t r = 0; r < psi.n_forms(); ++r) {
            double lhs = 0.0;
            for (std::size_t c = 0; c < n; ++c) lhs += ext.extended.forms[r][c] * u[c];
            for (std::size_t kk = 0; kk < s1; ++kk)
                lhs += ext.extended.forms[r][n + kk] * w[kk];
            double rhs = 0.0;
            for (std::size_t c = 0; c < n; ++c) rhs += psi.forms[r][c] * shifted[c];
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
        }
    }

    // psi'_i(0, w) = w_1 + ... + w_{s+1}.
    for (std::size_t kk = 0; kk < s1; ++kk)
        CHECK(ext.extended.forms[2][n + kk] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("extend_normal_form: diagonal system with singleton partition") {
    FormSystem psi = FormSystem::from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    Partition singletons = {{1}, {2}};
    NormalFormExtension ext = extend_normal_form(psi, 0, singletons);
    CHECK(ext.witness.is_normal);
}

TEST_CASE("shift vector norms stay within the advisory bound 10/margin") {
    FormSystem psi = ap_system();
    ComplexityReport rep = cs_complexity(psi, 0.1);
    for (std::size_t i = 0; i < 4; ++i) {
        NormalFormExtension ext = extend_normal_form(psi, i, rep.best_partition[i]);
        double min_margin = *std::min_element(ext.margins.begin(), ext.margins.end());
        for (const auto& f : ext.shift_vectors) {
            double norm = 0.0;
            for (double v : f) norm = std::max(norm, std::fabs(v));
            CHECK(norm <= 10.0 / min_margin);
        }
    }
}

TEST_CASE("cautionary family: complexity flips to infinite before shifts blow up") {
    auto family = [](double iota_inv) {
        return FormSystem::from_rows(
            {{1.0 + iota_inv, 1.0, 0.0}, {1.0, 1.0, 0.0}, {0.0, 0.0, 1.0}});
    };
    const double c1 = 0.1;

    // Comfortably non-degenerate: finite, bounded shifts.
    ComplexityReport wide = cs_complexity(family(0.5), c1);
    CHECK(wide.finite());
    NormalFormExtension ext = extend_normal_form(family(0.5), 0, wide.best_partition[0]);
    for (const auto& f : ext.shift_vectors)
        for (double v : f) CHECK(std::fabs(v) <= 100.0);

    // Near-degenerate: the fixed c1 declares it infinite rather than emitting
    // huge shifts.
    ComplexityReport narrow = cs_complexity(family(0.01), c1);
    CHECK_FALSE(narrow.finite());
}
