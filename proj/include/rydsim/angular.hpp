#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace rydsim {

// Angular momentum stored as twice its value, so half-integers stay exact.
struct HalfInt {
    int tw = 0;

    HalfInt() = default;
    explicit constexpr HalfInt(int whole) : tw(2 * whole) {}
    static constexpr HalfInt twice(int t) {
        HalfInt h;
        h.tw = t;
        return h;
    }

    constexpr bool is_integer() const { return (tw & 1) == 0; }
    constexpr double value() const { return 0.5 * tw; }

    friend constexpr bool operator==(HalfInt a, HalfInt b) { return a.tw == b.tw; }
    friend constexpr bool operator!=(HalfInt a, HalfInt b) { return a.tw != b.tw; }
    friend constexpr bool operator<(HalfInt a, HalfInt b) { return a.tw < b.tw; }
    friend constexpr HalfInt operator+(HalfInt a, HalfInt b) { return twice(a.tw + b.tw); }
    friend constexpr HalfInt operator-(HalfInt a, HalfInt b) { return twice(a.tw - b.tw); }
    friend constexpr HalfInt operator-(HalfInt a) { return twice(-a.tw); }
};

inline constexpr HalfInt half_twice(int t) { return HalfInt::twice(t); }

namespace angdetail {

inline constexpr int kMaxFactorial = 512;

inline const std::vector<int>& primes() {
    static const std::vector<int> table = [] {
        std::vector<int> p;
        std::array<bool, kMaxFactorial + 1> sieve{};
        for (int i = 2; i <= kMaxFactorial; ++i) {
            if (sieve[i]) continue;
            p.push_back(i);
            for (int k = 2 * i; k <= kMaxFactorial; k += i) sieve[k] = true;
        }
        return p;
    }();
    return table;
}

inline const std::vector<double>& log_primes() {
    static const std::vector<double> table = [] {
        std::vector<double> lp;
        for (int p : primes()) lp.push_back(std::log(static_cast<double>(p)));
        return lp;
    }();
    return table;
}

// Product of factorials in exact prime-factorized form. Exponents are stored
// doubled so square roots of factorials are exact too; the conversion to
// double happens once, at evaluation.
class FactProduct {
  public:
    FactProduct() : e2_(primes().size(), 0) {}

    // multiply by n!^(w/2); w = 2 is a plain factorial, w = 1 its square root
    void mul_fact(int n, int w) {
        if (n < 0) throw std::invalid_argument("factorial of negative number");
        if (n > kMaxFactorial)
            throw std::invalid_argument("factorial argument too large: " + std::to_string(n));
        const auto& ps = primes();
        for (std::size_t i = 0; i < ps.size() && ps[i] <= n; ++i) {
            int ex = 0;
            for (long long q = ps[i]; q <= n; q *= ps[i]) ex += n / static_cast<int>(q);
            e2_[i] += w * ex;
        }
    }

    double value() const {
        double lg = 0.0;
        const auto& lp = log_primes();
        for (std::size_t i = 0; i < e2_.size(); ++i)
            if (e2_[i] != 0) lg += 0.5 * e2_[i] * lp[i];
        return std::exp(lg);
    }

  private:
    std::vector<int> e2_;
};

inline bool triangle_ok(HalfInt a, HalfInt b, HalfInt c) {
    if (((a.tw + b.tw + c.tw) & 1) != 0) return false;
    return c.tw >= std::abs(a.tw - b.tw) && c.tw <= a.tw + b.tw;
}

inline void require_valid_jm(HalfInt j, HalfInt m, const char* who) {
    if (j.tw < 0) throw std::invalid_argument(std::string(who) + ": j must be >= 0");
    if (((j.tw + m.tw) & 1) != 0)
        throw std::invalid_argument(std::string(who) + ": j and m must differ by an integer");
    if (std::abs(m.tw) > j.tw)
        throw std::invalid_argument(std::string(who) + ": |m| must be <= j");
}

// sqrt of a triangle coefficient: sqrt[(a+b-c)!(a-b+c)!(-a+b+c)!/(a+b+c+1)!]
inline void mul_sqrt_triangle(FactProduct& f, HalfInt a, HalfInt b, HalfInt c) {
    f.mul_fact((a.tw + b.tw - c.tw) / 2, 1);
    f.mul_fact((a.tw - b.tw + c.tw) / 2, 1);
    f.mul_fact((-a.tw + b.tw + c.tw) / 2, 1);
    f.mul_fact((a.tw + b.tw + c.tw) / 2 + 1, -1);
}

}  // namespace angdetail

// <j1 m1 j2 m2 | J M>, Racah's closed form evaluated from exact
// prime-factorized factorial ratios.
inline double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J,
                             HalfInt M) {
    using namespace angdetail;
    require_valid_jm(j1, m1, "clebsch_gordan");
    require_valid_jm(j2, m2, "clebsch_gordan");
    require_valid_jm(J, M, "clebsch_gordan");
    if (m1.tw + m2.tw != M.tw) return 0.0;
    if (!triangle_ok(j1, j2, J)) return 0.0;

    FactProduct pref;
    mul_sqrt_triangle(pref, j1, j2, J);
    pref.mul_fact((J.tw + M.tw) / 2, 1);
    pref.mul_fact((J.tw - M.tw) / 2, 1);
    pref.mul_fact((j1.tw - m1.tw) / 2, 1);
    pref.mul_fact((j1.tw + m1.tw) / 2, 1);
    pref.mul_fact((j2.tw - m2.tw) / 2, 1);
    pref.mul_fact((j2.tw + m2.tw) / 2, 1);
    const double prefactor = std::sqrt(J.tw + 1.0) * pref.value();

    const int t1 = (j1.tw + j2.tw - J.tw) / 2;   // j1+j2-J
    const int t2 = (j1.tw - m1.tw) / 2;          // j1-m1
    const int t3 = (j2.tw + m2.tw) / 2;          // j2+m2
    const int t4 = (J.tw - j2.tw + m1.tw) / 2;   // J-j2+m1 (may be negative)
    const int t5 = (J.tw - j1.tw - m2.tw) / 2;   // J-j1-m2 (may be negative)

    const int kmin = std::max({0, -t4, -t5});
    const int kmax = std::min({t1, t2, t3});
    double sum = 0.0;
    for (int k = kmin; k <= kmax; ++k) {
        FactProduct term;
        term.mul_fact(k, -2);
        term.mul_fact(t1 - k, -2);
        term.mul_fact(t2 - k, -2);
        term.mul_fact(t3 - k, -2);
        term.mul_fact(t4 + k, -2);
        term.mul_fact(t5 + k, -2);
        sum += ((k & 1) ? -1.0 : 1.0) * term.value();
    }
    return prefactor * sum;
}

inline double wigner_3j(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt j3,
                        HalfInt m3) {
    if (m1.tw + m2.tw + m3.tw != 0) return 0.0;
    const int phase_tw = j1.tw - j2.tw - m3.tw;  // (-1)^(j1-j2-m3)
    const double sign = ((phase_tw / 2) & 1) ? -1.0 : 1.0;
    return sign * clebsch_gordan(j1, m1, j2, m2, j3, -m3) / std::sqrt(j3.tw + 1.0);
}

// {j1 j2 j3; j4 j5 j6} by the Racah sum
inline double wigner_6j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5,
                        HalfInt j6) {
    using namespace angdetail;
    for (HalfInt j : {j1, j2, j3, j4, j5, j6})
        if (j.tw < 0) throw std::invalid_argument("wigner_6j: j must be >= 0");
    if (!triangle_ok(j1, j2, j3) || !triangle_ok(j1, j5, j6) || !triangle_ok(j4, j2, j6) ||
        !triangle_ok(j4, j5, j3))
        return 0.0;

    FactProduct pref;
    mul_sqrt_triangle(pref, j1, j2, j3);
    mul_sqrt_triangle(pref, j1, j5, j6);
    mul_sqrt_triangle(pref, j4, j2, j6);
    mul_sqrt_triangle(pref, j4, j5, j3);
    const double prefactor = pref.value();

    const int a1 = (j1.tw + j2.tw + j3.tw) / 2;
    const int a2 = (j1.tw + j5.tw + j6.tw) / 2;
    const int a3 = (j4.tw + j2.tw + j6.tw) / 2;
    const int a4 = (j4.tw + j5.tw + j3.tw) / 2;
    const int b1 = (j1.tw + j2.tw + j4.tw + j5.tw) / 2;
    const int b2 = (j2.tw + j3.tw + j5.tw + j6.tw) / 2;
    const int b3 = (j3.tw + j1.tw + j6.tw + j4.tw) / 2;

    const int tmin = std::max({a1, a2, a3, a4});
    const int tmax = std::min({b1, b2, b3});
    double sum = 0.0;
    for (int t = tmin; t <= tmax; ++t) {
        FactProduct term;
        term.mul_fact(t + 1, 2);
        term.mul_fact(t - a1, -2);
        term.mul_fact(t - a2, -2);
        term.mul_fact(t - a3, -2);
        term.mul_fact(t - a4, -2);
        term.mul_fact(b1 - t, -2);
        term.mul_fact(b2 - t, -2);
        term.mul_fact(b3 - t, -2);
        sum += ((t & 1) ? -1.0 : 1.0) * term.value();
    }
    return prefactor * sum;
}

// Dense row-major matrix small enough for angular tables.
struct AngMatrix {
    int rows = 0, cols = 0;
    std::vector<double> a;

    AngMatrix() = default;
    AngMatrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}
    double& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
};

// Rotation matrix d^j_{m'm}(beta); rows and columns ordered by descending m
// (m = j first). Row index r corresponds to m' = j - r.
inline AngMatrix wigner_d_matrix(HalfInt j, double beta) {
    using namespace angdetail;
    if (j.tw < 0) throw std::invalid_argument("wigner_d_matrix: j must be >= 0");
    const int dim = j.tw + 1;
    AngMatrix d(dim, dim);
    const double cb = std::cos(0.5 * beta);
    const double sb = std::sin(0.5 * beta);
    for (int r = 0; r < dim; ++r) {
        const int tmp = j.tw - 2 * r;   // 2*m'
        for (int c = 0; c < dim; ++c) {
            const int tm = j.tw - 2 * c;  // 2*m
            const int kmin = std::max(0, (tm - tmp) / 2);
            const int kmax = std::min((j.tw + tm) / 2, (j.tw - tmp) / 2);
            FactProduct pref;
            pref.mul_fact((j.tw + tm) / 2, 1);
            pref.mul_fact((j.tw - tm) / 2, 1);
            pref.mul_fact((j.tw + tmp) / 2, 1);
            pref.mul_fact((j.tw - tmp) / 2, 1);
            const double prefactor = pref.value();
            double sum = 0.0;
            for (int k = kmin; k <= kmax; ++k) {
                FactProduct term;
                term.mul_fact((j.tw + tm) / 2 - k, -2);
                term.mul_fact(k, -2);
                term.mul_fact((j.tw - tmp) / 2 - k, -2);
                term.mul_fact(k + (tmp - tm) / 2, -2);
                const int cpow = j.tw - 2 * k + (tm - tmp) / 2;
                const int spow = 2 * k - (tm - tmp) / 2;
                double sign = ((k + (tmp - tm) / 2) & 1) ? -1.0 : 1.0;
                sum += sign * term.value() * std::pow(cb, cpow) * std::pow(sb, spow);
            }
            d.at(r, c) = prefactor * sum;
        }
    }
    return d;
}

// Matrix of <j_b m_b | T^1_q | j_a m_a> over Zeeman sublevels, up to the
// reduced matrix element: entries are <j_a m_a; 1 q | j_b m_b>. Rows index
// m_b descending, columns m_a descending. allowed=false (and a zero matrix)
// when the triangle rule forbids the rank-1 coupling.
struct DipoleBlock {
    AngMatrix m;
    bool allowed = true;
};

inline DipoleBlock dipole_component_matrix(HalfInt j_a, HalfInt j_b, int q) {
    using namespace angdetail;
    if (q < -1 || q > 1) throw std::invalid_argument("dipole_component_matrix: q must be -1, 0, 1");
    DipoleBlock blk;
    blk.m = AngMatrix(j_b.tw + 1, j_a.tw + 1);
    if (!triangle_ok(j_a, HalfInt(1), j_b)) {
        blk.allowed = false;
        return blk;
    }
    for (int c = 0; c <= j_a.tw; ++c) {
        const int tma = j_a.tw - 2 * c;
        const int tmb = tma + 2 * q;
        if (std::abs(tmb) > j_b.tw) continue;
        const int r = (j_b.tw - tmb) / 2;
        blk.m.at(r, c) = clebsch_gordan(j_a, half_twice(tma), HalfInt(1), HalfInt(q), j_b,
                                        half_twice(tmb));
    }
    return blk;
}

// <l' j' m+q | C^1_q | l j m> for spin-1/2 alkali fine-structure states,
// by decoupling the spin: sum over ms of the two CG recouplings times the
// orbital reduced element sqrt((2l+1)/(2l'+1)) <l 0; 1 0 | l' 0>.
inline double c1_fine_structure(int l_a, HalfInt j_a, HalfInt m_a, int l_b, HalfInt j_b,
                                int q) {
    const HalfInt s = half_twice(1);
    const HalfInt m_b = half_twice(m_a.tw + 2 * q);
    if (std::abs(m_b.tw) > j_b.tw) return 0.0;
    const double orb_reduced = std::sqrt((2.0 * l_a + 1.0) / (2.0 * l_b + 1.0)) *
                               clebsch_gordan(HalfInt(l_a), HalfInt(0), HalfInt(1), HalfInt(0),
                                              HalfInt(l_b), HalfInt(0));
    double sum = 0.0;
    for (int tms = -1; tms <= 1; tms += 2) {
        const HalfInt ms = half_twice(tms);
        const HalfInt ml_a = half_twice(m_a.tw - tms);
        const HalfInt ml_b = half_twice(m_b.tw - tms);
        if (std::abs(ml_a.tw) > 2 * l_a || std::abs(ml_b.tw) > 2 * l_b) continue;
        sum += clebsch_gordan(HalfInt(l_a), ml_a, s, ms, j_a, m_a) *
               clebsch_gordan(HalfInt(l_b), ml_b, s, ms, j_b, m_b) *
               clebsch_gordan(HalfInt(l_a), ml_a, HalfInt(1), HalfInt(q), HalfInt(l_b), ml_b);
    }
    return orb_reduced * sum;
}

}  // namespace rydsim
