#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rydsim/angular.hpp"
#include "rydsim/constants.hpp"
#include "rydsim/levels.hpp"
#include "rydsim/rng.hpp"

namespace rydsim {

// Which fine-structure exit channel sets the reference energy defect that
// normalizes the dimensionless eigenvalues D_phi.
enum class RefChannel { f5, f7 };

struct PairGeometry {
    double r_um = 0.0;      // interatomic distance
    double theta_rad = 0.0; // angle between interatomic axis and quantization axis
};

struct PairEigenmode {
    int m_total = 0;        // conserved total projection on the interatomic axis
    double d_phi = 0.0;     // dimensionless interaction eigenvalue
    bool symmetric = true;  // even under atom exchange
    Eigen::VectorXd vec;    // components in the |m1,m2> pair basis, m descending
    double kappa = 0.0;     // overlap with the laser-excited pair state (geometry-dependent)

    double kappa2() const { return kappa * kappa; }
};

// V(R) = C6 D_phi / R^6, as frequency
inline double pair_interaction_strength_hz(double c6_ghz_um6, double d_phi, double r_um) {
    if (!(r_um > 0.0)) throw std::invalid_argument("pair_interaction_strength: r must be > 0");
    const double r3 = r_um * r_um * r_um;
    return c6_ghz_um6 * 1e9 * d_phi / (r3 * r3);
}

// Second-order dipole-dipole operator for an nd5/2 + nd5/2 pair coupled to
// the (n+2)p3/2 + (n-2)f manifolds, projected back onto the 36 Zeeman pair
// states. Eigenvalues are dimensionless (D_phi), normalized to the reference
// channel defect; the absolute scale is carried separately by c6_ghz_um6.
class VdwModel {
  public:
    int n = 43;
    double c6_ghz_um6 = 450.0;
    RefChannel reference = RefChannel::f7;
    double defect_f5_hz = 0.0;
    double defect_f7_hz = 0.0;

    static VdwModel build(const QuantumDefectModel& qd, int n = 43,
                          RefChannel ref = RefChannel::f7, double c6_ghz_um6 = 450.0) {
        VdwModel m;
        m.n = n;
        m.reference = ref;
        m.c6_ghz_um6 = c6_ghz_um6;
        const RydbergLevel d5(n, 2, half_twice(5));
        const RydbergLevel p3(n + 2, 1, half_twice(3));
        const RydbergLevel f5(n - 2, 3, half_twice(5));
        const RydbergLevel f7(n - 2, 3, half_twice(7));
        m.defect_f5_hz = forster_defect_hz(qd, {d5, d5, p3, f5});
        m.defect_f7_hz = forster_defect_hz(qd, {d5, d5, p3, f7});
        m.op_ = build_operator(m.reference_defect_hz(), m.defect_f5_hz, m.defect_f7_hz);
        return m;
    }

    double reference_defect_hz() const {
        return reference == RefChannel::f7 ? defect_f7_hz : defect_f5_hz;
    }

    const Eigen::MatrixXd& effective_vdw_operator() const { return op_; }

    // eigenmodes sorted by M, then |D|; exchange-symmetric first on ties
    std::vector<PairEigenmode> eigenmodes() const {
        std::vector<PairEigenmode> modes;
        modes.reserve(36);
        for (int m_tot = -5; m_tot <= 5; ++m_tot) {
            std::vector<int> idx;
            for (int a = 0; a < 36; ++a)
                if (5 - (a / 6) - (a % 6) == m_tot) idx.push_back(a);
            const int nb = static_cast<int>(idx.size());
            Eigen::MatrixXd block(nb, nb);
            for (int r = 0; r < nb; ++r)
                for (int c = 0; c < nb; ++c) block(r, c) = op_(idx[r], idx[c]);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block);
            if (es.info() != Eigen::Success)
                throw NumericalError("vdw eigenmodes: diagonalization failed");
            for (int k = 0; k < nb; ++k) {
                PairEigenmode mode;
                mode.m_total = m_tot;
                mode.d_phi = es.eigenvalues()(k);
                mode.vec = Eigen::VectorXd::Zero(36);
                for (int r = 0; r < nb; ++r) mode.vec(idx[r]) = es.eigenvectors()(r, k);
                double swap_overlap = 0.0;
                for (int a = 0; a < 36; ++a) {
                    const int swapped = (a % 6) * 6 + (a / 6);
                    swap_overlap += mode.vec(a) * mode.vec(swapped);
                }
                mode.symmetric = swap_overlap > 0.0;
                modes.push_back(std::move(mode));
            }
        }
        std::sort(modes.begin(), modes.end(), [](const PairEigenmode& x, const PairEigenmode& y) {
            if (x.m_total != y.m_total) return x.m_total < y.m_total;
            if (std::abs(x.d_phi) != std::abs(y.d_phi))
                return std::abs(x.d_phi) < std::abs(y.d_phi);
            return x.symmetric && !y.symmetric;
        });
        return modes;
    }

    // diagnostic: single-channel strength estimate from defect + radial elements
    static double own_route_c6_ghz_um6(const QuantumDefectModel& qd, int n, RefChannel ref) {
        const RydbergLevel d5(n, 2, half_twice(5));
        const RydbergLevel p3(n + 2, 1, half_twice(3));
        const RydbergLevel f(n - 2, 3, ref == RefChannel::f7 ? half_twice(7) : half_twice(5));
        const double rpd = radial_matrix_element_a0(qd, d5, p3);
        const double rdf = radial_matrix_element_a0(qd, d5, f);
        const double defect =
            std::abs(forster_defect_hz(qd, {d5, d5, p3, f}));
        const double e2a02 = phys::e_c * phys::e_c * phys::a0_m * phys::a0_m;
        const double coupling = e2a02 * rpd * rdf / (4.0 * phys::pi * phys::eps0_f_m);
        const double c6_hz_m6 = coupling * coupling / (phys::h_j_s * phys::h_j_s * defect);
        return c6_hz_m6 * 1e-9 / 1e-36;  // Hz m^6 -> GHz um^6
    }

  private:
    Eigen::MatrixXd op_;

    // <l'j', m+q| C^1_q |d5/2, m> tables for one exit state
    static Eigen::MatrixXd c1_table(int l_b, HalfInt j_b, int q) {
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(j_b.tw + 1, 6);
        for (int c = 0; c < 6; ++c) {
            const HalfInt m_a = half_twice(5 - 2 * c);
            const HalfInt m_b = half_twice(m_a.tw + 2 * q);
            if (std::abs(m_b.tw) > j_b.tw) continue;
            const int r = (j_b.tw - m_b.tw) / 2;
            t(r, c) = c1_fine_structure(2, half_twice(5), m_a, l_b, j_b, q);
        }
        return t;
    }

    static Eigen::MatrixXd build_operator(double ref_hz, double f5_hz, double f7_hz) {
        struct Exit {
            HalfInt jf;
            double defect_hz;
        };
        const Exit exits[2] = {{half_twice(5), f5_hz}, {half_twice(7), f7_hz}};
        // spherical components of d1.d2 - 3 d1z d2z
        const struct {
            int q1, q2;
            double w;
        } terms[3] = {{0, 0, -2.0}, {1, -1, -1.0}, {-1, 1, -1.0}};

        Eigen::MatrixXd op = Eigen::MatrixXd::Zero(36, 36);
        for (const Exit& ex : exits) {
            const double weight = std::abs(ref_hz) / std::abs(ex.defect_hz);
            Eigen::MatrixXd cp[3], cf[3];
            for (int t = 0; t < 3; ++t) {
                cp[t] = c1_table(1, half_twice(3), terms[t].q1);
                cf[t] = c1_table(3, ex.jf, terms[t].q2);
            }
            for (int order = 0; order < 2; ++order) {
                const Eigen::Index rows = cp[0].rows() * cf[0].rows();
                Eigen::MatrixXd b = Eigen::MatrixXd::Zero(rows, 36);
                for (int t = 0; t < 3; ++t) {
                    const Eigen::MatrixXd& first = (order == 0) ? cp[t] : cf[t];
                    const Eigen::MatrixXd& second = (order == 0) ? cf[t] : cp[t];
                    for (Eigen::Index r1 = 0; r1 < first.rows(); ++r1)
                        for (Eigen::Index c1 = 0; c1 < 6; ++c1)
                            for (Eigen::Index r2 = 0; r2 < second.rows(); ++r2)
                                for (Eigen::Index c2 = 0; c2 < 6; ++c2)
                                    b(r1 * second.rows() + r2, c1 * 6 + c2) +=
                                        terms[t].w * first(r1, c1) * second(r2, c2);
                }
                op += weight * b.transpose() * b;
            }
        }
        return op;
    }
};

// Fill kappa of each mode for the laser-excited pair |m_j=1/2, m_j=1/2>
// quantized along the beam axis, seen from an interatomic axis tilted by theta.
inline void excited_state_overlaps(std::vector<PairEigenmode>& modes, double theta_rad) {
    const AngMatrix d = wigner_d_matrix(half_twice(5), theta_rad);
    Eigen::VectorXd v1(6);
    for (int r = 0; r < 6; ++r) v1(r) = d.at(r, 2);  // column m = +1/2
    Eigen::VectorXd pair(36);
    for (int a = 0; a < 36; ++a) pair(a) = v1(a / 6) * v1(a % 6);
    for (PairEigenmode& mode : modes) mode.kappa = mode.vec.dot(pair);
}

// Discrete (D, weight) distribution of the eigenmodes versus theta, cached on
// a uniform theta grid so ensemble sampling stays cheap and deterministic.
class EigenmodeSampler {
  public:
    EigenmodeSampler() = default;

    explicit EigenmodeSampler(const VdwModel& model, int theta_bins = 180)
        : bins_(theta_bins) {
        auto modes = model.eigenmodes();
        d_.reserve(modes.size());
        for (const auto& m : modes) d_.push_back(m.d_phi);
        cdf_.resize(static_cast<std::size_t>(bins_ + 1) * modes.size());
        for (int b = 0; b <= bins_; ++b) {
            const double theta = phys::pi * b / bins_;
            excited_state_overlaps(modes, theta);
            double acc = 0.0;
            for (std::size_t k = 0; k < modes.size(); ++k) {
                acc += modes[k].kappa2();
                cdf_[b * modes.size() + k] = acc;
            }
            const double norm = acc;  // = 1 up to rounding
            for (std::size_t k = 0; k < modes.size(); ++k) cdf_[b * modes.size() + k] /= norm;
        }
    }

    bool empty() const { return d_.empty(); }

    double sample(RandomStream& rng, double theta_rad) const {
        const double t = std::clamp(theta_rad, 0.0, phys::pi);
        const int b = static_cast<int>(std::lround(t / phys::pi * bins_));
        const double u = rng.uniform();
        const double* cdf = &cdf_[static_cast<std::size_t>(b) * d_.size()];
        const std::size_t k =
            std::lower_bound(cdf, cdf + d_.size(), u) - cdf;
        return d_[std::min(k, d_.size() - 1)];
    }

  private:
    int bins_ = 0;
    std::vector<double> d_;
    std::vector<double> cdf_;
};

}  // namespace rydsim
