#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace topstmin::milp {

// Column-compressed sparse matrix.
struct CscMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<int> start{0};
    std::vector<int> index;
    std::vector<double> value;
};

// Bounded dual simplex over  A x - s = 0,  lo <= (x, s) <= hi,  min c^T x.
// Logical s_i carries the row bounds; structurals must be boxed. The explicit
// dense basis inverse keeps the code short and is adequate for a few hundred rows.
class DualSimplex {
public:
    enum class Outcome { Optimal, Infeasible, Cutoff, IterationLimit, TimeLimit };
    enum class State : char { Basic, Lower, Upper };

    struct Basis {
        std::vector<int> head;
        std::vector<State> state;
    };

    using Clock = std::chrono::steady_clock;

    DualSimplex(CscMatrix a, std::vector<double> cost, std::vector<double> lo, std::vector<double> hi)
        : a_(std::move(a)), n_(a_.cols), m_(a_.rows), cost_(std::move(cost)), lo_(std::move(lo)), hi_(std::move(hi)) {
        cost_.resize(n_ + m_, 0.0);
        base_cost_ = cost_;
        x_.assign(n_ + m_, 0.0);
        d_.assign(n_ + m_, 0.0);
        alpha_row_.assign(n_ + m_, 0.0);
        reset_basis();
    }

    int num_structurals() const { return n_; }
    int num_rows() const { return m_; }
    long iterations() const { return total_iters_; }

    void set_bounds(int j, double lo, double hi) {
        lo_[j] = lo;
        hi_[j] = hi;
        if (state_[j] != State::Basic) x_[j] = state_[j] == State::Lower ? lo : hi;
        dirty_ = true;
    }

    // All logicals basic; each structural at the bound its cost sign prefers.
    void reset_basis() {
        head_.resize(m_);
        state_.assign(n_ + m_, State::Lower);
        for (int i = 0; i < m_; ++i) {
            head_[i] = n_ + i;
            state_[n_ + i] = State::Basic;
        }
        for (int j = 0; j < n_; ++j) {
            state_[j] = cost_[j] >= 0 ? State::Lower : State::Upper;
            x_[j] = state_[j] == State::Lower ? lo_[j] : hi_[j];
        }
        need_factor_ = true;
    }

    Basis basis() const { return {head_, state_}; }

    void load_basis(const Basis& b) {
        head_ = b.head;
        state_ = b.state;
        for (int j = 0; j < n_ + m_; ++j)
            if (state_[j] != State::Basic) x_[j] = state_[j] == State::Lower ? lo_[j] : hi_[j];
        need_factor_ = true;
    }

    double objective() const {
        double z = 0.0;
        for (int j = 0; j < n_; ++j) z += base_cost_[j] * x_[j];
        return z;
    }
    const std::vector<double>& values() const { return x_; }

    // Stops early with Cutoff once the (monotone) dual objective exceeds `cutoff`.
    Outcome solve(double cutoff = std::numeric_limits<double>::infinity(),
                  std::optional<Clock::time_point> deadline = std::nullopt, long iteration_limit = -1) {
        if (iteration_limit < 0) iteration_limit = 50L * (n_ + m_) + 10000;
        if (need_factor_) {
            factor_or_reset();
        } else if (dirty_) {
            restore_dual_feasibility();
            recompute_primal();
        }
        dirty_ = false;
        if (!perturbed_) perturb();
        long iters = 0;
        int degenerate = 0;
        int careful = 0;  // iterations left in smallest-index mode
        while (true) {
            if (iters >= iteration_limit) return Outcome::IterationLimit;
            if (deadline && (iters & 31) == 0 && Clock::now() >= *deadline) return Outcome::TimeLimit;
            if (pivots_ >= kRefactorEvery) factor_or_reset();
            if ((iters & 7) == 0 && dual_bound() > cutoff + 1e-7 * (1.0 + std::abs(cutoff))) return Outcome::Cutoff;

            const int r = choose_leaving(careful > 0);
            if (r < 0) {
                if (perturbed_) {
                    // drop the cost shifts; a few more iterations may follow
                    unperturb();
                    continue;
                }
                if (objective() > cutoff + 1e-7 * (1.0 + std::abs(cutoff))) return Outcome::Cutoff;
                return Outcome::Optimal;
            }
            const int p = head_[r];
            const bool to_lower = x_[p] < lo_[p];
            const double bound = to_lower ? lo_[p] : hi_[p];

            compute_row(r);
            double delta = x_[p] - bound;
            const int q = choose_entering(delta > 0 ? 1.0 : -1.0, std::abs(delta), careful > 0);
            if (q < 0) return Outcome::Infeasible;

            compute_column(q);
            const double arq = alpha_row_[q];
            const double pivot = col_[r];
            if (std::abs(pivot - arq) > 1e-7 * (1.0 + std::abs(arq)) && pivots_ > 0) {
                flips_.clear();
                factor_or_reset();
                continue;
            }
            if (!flips_.empty()) {
                apply_flips();
                delta = x_[p] - bound;
            }
            // a reduced cost inside the tolerance band may have the wrong sign
            if ((state_[q] == State::Lower && d_[q] < 0.0) || (state_[q] == State::Upper && d_[q] > 0.0)) d_[q] = 0.0;

            const double theta = d_[q] / arq;
            for (int j = 0; j < n_ + m_; ++j)
                if (state_[j] != State::Basic && alpha_row_[j] != 0.0) d_[j] -= theta * alpha_row_[j];
            d_[q] = 0.0;
            d_[p] = -theta;

            const double step = delta / pivot;
            for (int k = 0; k < m_; ++k)
                if (col_[k] != 0.0) x_[head_[k]] -= step * col_[k];
            x_[q] += step;
            x_[p] = bound;
            state_[p] = to_lower ? State::Lower : State::Upper;
            state_[q] = State::Basic;
            head_[r] = q;
            update_inverse(r);

            ++iters;
            ++total_iters_;
            if (careful > 0) --careful;
            if (std::abs(theta) < 1e-12) {
                if (++degenerate > 60 && careful == 0) {
                    careful = 300;
                    degenerate = 0;
                }
            } else {
                degenerate = 0;
            }
        }
    }

private:
    static constexpr int kRefactorEvery = 100;
    static constexpr double kPrimalTol = 1e-7;
    static constexpr double kDualTol = 1e-7;
    static constexpr double kPivotTol = 1e-9;

    double& binv(int i, int k) { return binv_[static_cast<std::size_t>(i) * m_ + k]; }
    double binv(int i, int k) const { return binv_[static_cast<std::size_t>(i) * m_ + k]; }

    // Valid lower bound on the unperturbed optimum while dual feasible.
    double dual_bound() const {
        double z = 0.0;
        for (int j = 0; j < n_; ++j) z += cost_[j] * x_[j];
        return z - shift_slack_;
    }

    // Small cost shifts in the direction each nonbasic variable already
    // prefers break the massive dual degeneracy of 0/1 routing models.
    void perturb() {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL;
        shift_slack_ = 0.0;
        for (int j = 0; j < n_; ++j) {
            h ^= h << 13;
            h ^= h >> 7;
            h ^= h << 17;
            const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
            const double delta = 1e-6 * (1.0 + std::abs(base_cost_[j])) * (1.0 + u);
            double sgn = state_[j] == State::Upper ? -1.0 : 1.0;
            if (state_[j] == State::Basic) sgn = (h & 1) ? 1.0 : -1.0;
            cost_[j] = base_cost_[j] + sgn * delta;
            shift_slack_ += delta * std::max(std::abs(lo_[j]), std::abs(hi_[j]));
        }
        perturbed_ = true;
        recompute_duals();
        restore_dual_feasibility();
        recompute_primal();
    }

    void unperturb() {
        cost_ = base_cost_;
        shift_slack_ = 0.0;
        perturbed_ = false;
        recompute_duals();
        restore_dual_feasibility();
        recompute_primal();
    }

    void factor_or_reset() {
        if (refactor()) return;
        reset_basis();
        refactor();
    }

    // Dense copy of the basis matrix, then Gauss-Jordan with partial pivoting.
    bool refactor() {
        std::vector<double> b(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int k = 0; k < m_; ++k) {
            const int j = head_[k];
            if (j < n_) {
                for (int e = a_.start[j]; e < a_.start[j + 1]; ++e) b[static_cast<std::size_t>(a_.index[e]) * m_ + k] = a_.value[e];
            } else {
                b[static_cast<std::size_t>(j - n_) * m_ + k] = -1.0;
            }
        }
        binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int i = 0; i < m_; ++i) binv(i, i) = 1.0;
        for (int c = 0; c < m_; ++c) {
            int piv = -1;
            double best = 1e-11;
            for (int i = c; i < m_; ++i) {
                const double v = std::abs(b[static_cast<std::size_t>(i) * m_ + c]);
                if (v > best) {
                    best = v;
                    piv = i;
                }
            }
            if (piv < 0) {
                need_factor_ = true;
                return false;
            }
            if (piv != c) {
                for (int k = 0; k < m_; ++k) {
                    std::swap(b[static_cast<std::size_t>(piv) * m_ + k], b[static_cast<std::size_t>(c) * m_ + k]);
                    std::swap(binv(piv, k), binv(c, k));
                }
            }
            const double inv = 1.0 / b[static_cast<std::size_t>(c) * m_ + c];
            for (int k = 0; k < m_; ++k) {
                b[static_cast<std::size_t>(c) * m_ + k] *= inv;
                binv(c, k) *= inv;
            }
            for (int i = 0; i < m_; ++i) {
                if (i == c) continue;
                const double f = b[static_cast<std::size_t>(i) * m_ + c];
                if (f == 0.0) continue;
                for (int k = 0; k < m_; ++k) {
                    b[static_cast<std::size_t>(i) * m_ + k] -= f * b[static_cast<std::size_t>(c) * m_ + k];
                    binv(i, k) -= f * binv(c, k);
                }
            }
        }
        // Row k of the inverse belongs to basis position k because column k of B is head_[k].
        pivots_ = 0;
        need_factor_ = false;
        recompute_duals();
        restore_dual_feasibility();
        recompute_primal();
        weights_.assign(m_, 0.0);
        for (int i = 0; i < m_; ++i) {
            double s = 0.0;
            for (int k = 0; k < m_; ++k) s += binv(i, k) * binv(i, k);
            weights_[i] = std::max(s, 1e-12);
        }
        return true;
    }

    void recompute_duals() {
        std::vector<double> y(m_, 0.0);
        for (int k = 0; k < m_; ++k) {
            const double cb = cost_[head_[k]];
            if (cb == 0.0) continue;
            for (int i = 0; i < m_; ++i) y[i] += cb * binv(k, i);
        }
        for (int j = 0; j < n_; ++j) {
            double s = 0.0;
            for (int e = a_.start[j]; e < a_.start[j + 1]; ++e) s += y[a_.index[e]] * a_.value[e];
            d_[j] = cost_[j] - s;
        }
        for (int i = 0; i < m_; ++i) d_[n_ + i] = y[i];
        for (int k = 0; k < m_; ++k) d_[head_[k]] = 0.0;
    }

    // Drift can leave a nonbasic reduced cost with the wrong sign; boxed
    // variables simply move to the other bound.
    void restore_dual_feasibility() {
        for (int j = 0; j < n_ + m_; ++j) {
            if (state_[j] == State::Basic || lo_[j] == hi_[j]) continue;
            if (state_[j] == State::Lower && d_[j] < -kDualTol && std::isfinite(hi_[j])) {
                state_[j] = State::Upper;
                x_[j] = hi_[j];
            } else if (state_[j] == State::Upper && d_[j] > kDualTol && std::isfinite(lo_[j])) {
                state_[j] = State::Lower;
                x_[j] = lo_[j];
            }
        }
    }

    void recompute_primal() {
        std::vector<double> rhs(m_, 0.0);
        for (int j = 0; j < n_ + m_; ++j) {
            if (state_[j] == State::Basic) continue;
            x_[j] = state_[j] == State::Lower ? lo_[j] : hi_[j];
            if (x_[j] == 0.0) continue;
            if (j < n_) {
                for (int e = a_.start[j]; e < a_.start[j + 1]; ++e) rhs[a_.index[e]] -= a_.value[e] * x_[j];
            } else {
                rhs[j - n_] += x_[j];
            }
        }
        for (int k = 0; k < m_; ++k) {
            double s = 0.0;
            for (int i = 0; i < m_; ++i) s += binv(k, i) * rhs[i];
            x_[head_[k]] = s;
        }
    }

    int choose_leaving(bool smallest_index) const {
        int best = -1;
        double best_score = 0.0;
        int best_var = std::numeric_limits<int>::max();
        for (int k = 0; k < m_; ++k) {
            const int j = head_[k];
            double infeas = 0.0;
            if (x_[j] < lo_[j] - kPrimalTol) infeas = lo_[j] - x_[j];
            else if (x_[j] > hi_[j] + kPrimalTol) infeas = x_[j] - hi_[j];
            if (infeas == 0.0) continue;
            if (smallest_index) {
                if (j < best_var) {
                    best_var = j;
                    best = k;
                }
                continue;
            }
            const double score = infeas * infeas / weights_[k];
            if (score > best_score) {
                best_score = score;
                best = k;
            }
        }
        return best;
    }

    void compute_row(int r) {
        rho_.assign(m_, 0.0);
        for (int i = 0; i < m_; ++i) rho_[i] = binv(r, i);
        for (int j = 0; j < n_; ++j) {
            if (state_[j] == State::Basic) {
                alpha_row_[j] = 0.0;
                continue;
            }
            double s = 0.0;
            for (int e = a_.start[j]; e < a_.start[j + 1]; ++e) s += rho_[a_.index[e]] * a_.value[e];
            alpha_row_[j] = s;
        }
        for (int i = 0; i < m_; ++i) alpha_row_[n_ + i] = state_[n_ + i] == State::Basic ? 0.0 : -rho_[i];
        alpha_row_[head_[r]] = 1.0;
    }

    // Bound-flipping dual ratio test with a Harris pass over the final group.
    // Boxed candidates passed on the way are recorded in flips_.
    int choose_entering(double sign, double infeasibility, bool smallest_index) {
        flips_.clear();
        cands_.clear();
        for (int j = 0; j < n_ + m_; ++j) {
            if (state_[j] == State::Basic || lo_[j] == hi_[j]) continue;
            const double a = sign * alpha_row_[j];
            if ((state_[j] == State::Lower && a > kPivotTol) || (state_[j] == State::Upper && a < -kPivotTol))
                cands_.push_back({std::max(d_[j] / a, 0.0), j});
        }
        if (cands_.empty()) return -1;
        std::sort(cands_.begin(), cands_.end());
        double slope = infeasibility;
        std::size_t start = 0;
        while (start < cands_.size()) {
            const int j = cands_[start].second;
            const double range = hi_[j] - lo_[j];
            if (!std::isfinite(range)) break;
            const double next = slope - std::abs(alpha_row_[j]) * range;
            if (next <= 0.0 || start + 1 == cands_.size()) break;
            slope = next;
            flips_.push_back(j);
            ++start;
        }
        double bound = std::numeric_limits<double>::infinity();
        for (std::size_t k = start; k < cands_.size(); ++k) {
            const int j = cands_[k].second;
            const double a = std::abs(alpha_row_[j]);
            bound = std::min(bound, (std::abs(d_[j]) + kDualTol) / a);
            if (cands_[k].first > bound) break;
        }
        int q = -1;
        double best_abs = 0.0;
        for (std::size_t k = start; k < cands_.size(); ++k) {
            if (cands_[k].first > bound) break;
            const int j = cands_[k].second;
            if (smallest_index) {
                if (q < 0 || j < q) q = j;
                continue;
            }
            if (std::abs(alpha_row_[j]) > best_abs) {
                best_abs = std::abs(alpha_row_[j]);
                q = j;
            }
        }
        return q;
    }

    // Moves the recorded nonbasic variables to their opposite bounds and
    // updates the basic values:  dx_B = -B^-1 sum_j a_j dx_j.
    void apply_flips() {
        std::vector<double> rhs(m_, 0.0);
        for (int j : flips_) {
            const bool up = state_[j] == State::Lower;
            const double dx = up ? hi_[j] - lo_[j] : lo_[j] - hi_[j];
            state_[j] = up ? State::Upper : State::Lower;
            x_[j] = up ? hi_[j] : lo_[j];
            if (j < n_) {
                for (int e = a_.start[j]; e < a_.start[j + 1]; ++e) rhs[a_.index[e]] += a_.value[e] * dx;
            } else {
                rhs[j - n_] -= dx;
            }
        }
        for (int k = 0; k < m_; ++k) {
            double s = 0.0;
            for (int i = 0; i < m_; ++i) s += binv(k, i) * rhs[i];
            x_[head_[k]] -= s;
        }
        flips_.clear();
    }

    void compute_column(int q) {
        col_.assign(m_, 0.0);
        if (q < n_) {
            for (int e = a_.start[q]; e < a_.start[q + 1]; ++e) {
                const int i = a_.index[e];
                const double v = a_.value[e];
                for (int k = 0; k < m_; ++k) col_[k] += binv(k, i) * v;
            }
        } else {
            const int i = q - n_;
            for (int k = 0; k < m_; ++k) col_[k] = -binv(k, i);
        }
    }

    void update_inverse(int r) {
        const double piv = col_[r];
        for (int i = 0; i < m_; ++i) binv(r, i) /= piv;
        for (int k = 0; k < m_; ++k) {
            if (k == r || col_[k] == 0.0) continue;
            const double f = col_[k];
            for (int i = 0; i < m_; ++i) binv(k, i) -= f * binv(r, i);
        }
        for (int k = 0; k < m_; ++k) {
            if (k != r && col_[k] == 0.0) continue;
            double s = 0.0;
            for (int i = 0; i < m_; ++i) s += binv(k, i) * binv(k, i);
            weights_[k] = std::max(s, 1e-12);
        }
        ++pivots_;
    }

    CscMatrix a_;
    int n_, m_;
    std::vector<double> cost_, lo_, hi_;
    std::vector<int> head_;
    std::vector<State> state_;
    std::vector<double> x_, d_, binv_, weights_;
    std::vector<double> alpha_row_, rho_, col_;
    std::vector<int> flips_;
    std::vector<std::pair<double, int>> cands_;
    int pivots_ = 0;
    long total_iters_ = 0;
    bool need_factor_ = true;
    bool dirty_ = false;
    bool perturbed_ = false;
    double shift_slack_ = 0.0;
    std::vector<double> base_cost_;
};

}  // namespace topstmin::milp
