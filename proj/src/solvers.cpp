// Copyright 2026 The qstmle Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qst/solvers.hpp"

#include "qst/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <ostream>
#include <random>

namespace qst {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Point {
    double alpha;
    double value;
    double slope;
};

// Minimizer of the cubic through two points with slopes, kept at least 10%
// of the interval away from either end; bisection when the cubic is unusable.
double interpolate(const Point& lo, const Point& hi) {
    const double a = lo.alpha;
    const double b = hi.alpha;
    const double left = std::min(a, b);
    const double width = std::abs(b - a);
    double trial = 0.5 * (a + b);
    if (std::isfinite(lo.value) && std::isfinite(hi.value) && std::isfinite(lo.slope) &&
        std::isfinite(hi.slope)) {
        const double d1 = lo.slope + hi.slope - 3.0 * (lo.value - hi.value) / (a - b);
        const double disc = d1 * d1 - lo.slope * hi.slope;
        if (disc >= 0.0) {
            const double d2 = std::copysign(std::sqrt(disc), b - a);
            const double denom = hi.slope - lo.slope + 2.0 * d2;
            if (denom != 0.0) {
                const double c = b - (b - a) * (hi.slope + d2 - d1) / denom;
                if (std::isfinite(c)) trial = c;
            }
        }
    }
    return std::clamp(trial, left + 0.1 * width, left + 0.9 * width);
}

struct SolverState {
    Eigen::VectorXd x;
    double value;
    Eigen::VectorXd grad;
};

bool relative_stall(const std::vector<double>& history, int window, double tol) {
    if (static_cast<int>(history.size()) <= window) return false;
    const double now = history.back();
    const double then = history[history.size() - 1 - static_cast<std::size_t>(window)];
    const double scale = std::max(std::abs(now), std::numeric_limits<double>::min());
    return std::abs(then - now) / scale <= tol;
}

class CertificateSchedule {
  public:
    CertificateSchedule(const SolverConfig& config, const CertificateCallback& cb)
        : every_(config.certificate_every), tol_(config.cert_tol), cb_(cb) {}

    std::optional<double> maybe(int iter, const Eigen::VectorXd& x) const {
        if (every_ <= 0 || !cb_ || iter % every_ != 0) return std::nullopt;
        return cb_(x);
    }

    bool satisfied(const std::optional<double>& bound) const {
        return tol_ > 0.0 && bound && *bound <= tol_;
    }

  private:
    int every_;
    double tol_;
    const CertificateCallback& cb_;
};

} // namespace

SolverMethod parse_solver_method(std::string_view name) {
    if (name == "lbfgs") return SolverMethod::lbfgs;
    if (name == "accgd") return SolverMethod::accgd;
    throw DomainError("unknown solver '" + std::string(name) + "'");
}

std::string_view to_string(SolverMethod method) {
    return method == SolverMethod::lbfgs ? "lbfgs" : "accgd";
}

std::string_view to_string(Termination t) {
    switch (t) {
    case Termination::grad_tol: return "grad_tol";
    case Termination::f_rel_tol: return "f_rel_tol";
    case Termination::max_iters: return "max_iters";
    case Termination::line_search_failure: return "line_search_failure";
    case Termination::certificate: return "certificate";
    }
    return "unknown";
}

void SolverConfig::validate() const {
    if (max_iters < 0) throw DomainError("max_iters must be non-negative");
    if (history < 1) throw DomainError("history must be at least 1");
    if (!(step_size > 0.0)) throw DomainError("step size must be positive");
    if (!(grad_tol > 0.0) || !(f_rel_tol > 0.0)) throw DomainError("tolerances must be positive");
    if (f_rel_window < 1) throw DomainError("f_rel_window must be at least 1");
    if (certificate_every < 0) throw DomainError("certificate_every must be non-negative");
    if (cert_tol < 0.0) throw DomainError("cert_tol must be non-negative");
    if (!(0.0 < wolfe_c1 && wolfe_c1 < wolfe_c2 && wolfe_c2 < 1.0)) {
        throw DomainError("Wolfe constants need 0 < c1 < c2 < 1");
    }
    if (max_line_search_evals < 1) throw DomainError("max_line_search_evals must be positive");
}

FactorMatrix init_factor(int n, int r, std::uint64_t seed) {
    if (n < 1 || n > 30 || r < 1) throw DomainError("init_factor needs n >= 1 and r >= 1");
    const Eigen::Index d = Eigen::Index{1} << n;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    FactorMatrix u(d, r);
    for (Eigen::Index c = 0; c < r; ++c) {
        for (Eigen::Index i = 0; i < d; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            u(i, c) = Complex(re, im);
        }
    }
    u /= u.norm();
    return u;
}

LineSearchResult strong_wolfe_search(const PackedObjective& f, const Eigen::VectorXd& x,
                                     double f0, const Eigen::VectorXd& g0,
                                     const Eigen::VectorXd& dir, double alpha0, double c1,
                                     double c2, int max_evals) {
    const double slope0 = g0.dot(dir);
    LineSearchResult res{false, 0.0, f0, x, g0, 0};
    if (!(slope0 < 0.0)) return res;

    Eigen::VectorXd trial_x;
    Eigen::VectorXd trial_g(x.size());
    auto evaluate = [&](double alpha) {
        trial_x = x + alpha * dir;
        const double v = f(trial_x, trial_g);
        ++res.evaluations;
        const double s = std::isfinite(v) ? trial_g.dot(dir) : std::numeric_limits<double>::quiet_NaN();
        return Point{alpha, std::isfinite(v) ? v : std::numeric_limits<double>::infinity(), s};
    };
    auto accept = [&](const Point& p) {
        res.ok = true;
        res.alpha = p.alpha;
        res.value = p.value;
        res.x = trial_x;
        res.grad = trial_g;
    };
    auto armijo_fails = [&](const Point& p) {
        return !std::isfinite(p.value) || p.value > f0 + c1 * p.alpha * slope0;
    };
    auto curvature_holds = [&](const Point& p) { return std::abs(p.slope) <= -c2 * slope0; };
    // Approximate Wolfe test: once the predicted decrease is below the
    // resolution of f, compare slopes instead of values.
    const double noise = 1e-12 * std::max(1.0, std::abs(f0));
    auto approx_wolfe = [&](const Point& p) {
        return std::isfinite(p.value) && p.value <= f0 + noise && p.slope >= c2 * slope0 &&
               p.slope <= (2.0 * c1 - 1.0) * slope0;
    };
    // Values within the noise band carry no ordering information.
    auto flat = [&](const Point& p) { return std::isfinite(p.value) && std::abs(p.value - f0) <= noise; };

    auto zoom = [&](Point lo, Point hi) {
        while (res.evaluations < max_evals) {
            if (std::abs(hi.alpha - lo.alpha) <= 1e-16 * std::max(1.0, std::abs(lo.alpha))) break;
            const Point p = evaluate(interpolate(lo, hi));
            if (approx_wolfe(p)) {
                accept(p);
                return;
            }
            if (flat(p)) {
                // Keep the bracket around the sign change of the slope.
                if ((p.slope >= 0.0) == (hi.alpha > lo.alpha)) {
                    hi = p;
                } else {
                    lo = p;
                }
                continue;
            }
            if (armijo_fails(p) || p.value >= lo.value) {
                hi = p;
            } else {
                if (curvature_holds(p)) {
                    accept(p);
                    return;
                }
                if (p.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
                lo = p;
            }
        }
    };

    Point prev{0.0, f0, slope0};
    double alpha = alpha0;
    for (int i = 0; res.evaluations < max_evals; ++i) {
        const Point p = evaluate(alpha);
        if (approx_wolfe(p)) {
            accept(p);
            return res;
        }
        if (flat(p)) {
            if (p.slope >= 0.0) {
                zoom(prev, p);
                return res;
            }
            prev = p;
            alpha *= 2.0;
            continue;
        }
        if (armijo_fails(p) || (i > 0 && p.value >= prev.value)) {
            zoom(prev, p);
            return res;
        }
        if (curvature_holds(p)) {
            accept(p);
            return res;
        }
        if (p.slope >= 0.0) {
            zoom(p, prev);
            return res;
        }
        prev = p;
        alpha *= 2.0;
    }
    return res;
}

SolveResult lbfgs_solve(const PackedObjective& f, const Eigen::VectorXd& x0,
                        const SolverConfig& config, const CertificateCallback& certificate) {
    config.validate();
    const auto start = Clock::now();
    const CertificateSchedule certs(config, certificate);

    SolverState s{x0, 0.0, Eigen::VectorXd(x0.size())};
    s.value = f(s.x, s.grad);
    if (!std::isfinite(s.value)) throw DomainError("objective is not finite at the initial point");

    SolveResult out{s.x, s.value, s.grad.norm(), {}, Termination::max_iters, 0, 1};
    out.trace.push_back({0, seconds_since(start), s.value, s.grad.norm(), certs.maybe(0, s.x)});
    std::vector<double> values{s.value};

    std::deque<Eigen::VectorXd> s_hist;
    std::deque<Eigen::VectorXd> y_hist;
    std::deque<double> rho_hist;
    bool restarted = false;

    int iter = 0;
    while (true) {
        const double gnorm = s.grad.norm();
        if (gnorm <= config.grad_tol) {
            out.termination = Termination::grad_tol;
            break;
        }
        if (iter >= config.max_iters) {
            out.termination = Termination::max_iters;
            break;
        }

        // Two-loop recursion.
        Eigen::VectorXd q = s.grad;
        const std::size_t m = s_hist.size();
        std::vector<double> a(m);
        for (std::size_t k = m; k-- > 0;) {
            a[k] = rho_hist[k] * s_hist[k].dot(q);
            q -= a[k] * y_hist[k];
        }
        if (m > 0) q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
        for (std::size_t k = 0; k < m; ++k) {
            const double b = rho_hist[k] * y_hist[k].dot(q);
            q += (a[k] - b) * s_hist[k];
        }
        Eigen::VectorXd dir = -q;
        if (!(dir.dot(s.grad) < 0.0)) {
            dir = -s.grad;
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
        }
        const double alpha0 = s_hist.empty() ? std::min(1.0, 1.0 / gnorm) : 1.0;

        LineSearchResult ls = strong_wolfe_search(f, s.x, s.value, s.grad, dir, alpha0,
                                                  config.wolfe_c1, config.wolfe_c2,
                                                  config.max_line_search_evals);
        out.evaluations += ls.evaluations;
        if (!ls.ok) {
            if (!restarted && !s_hist.empty()) {
                restarted = true;
                s_hist.clear();
                y_hist.clear();
                rho_hist.clear();
                continue;
            }
            out.termination = Termination::line_search_failure;
            break;
        }
        restarted = false;
        ++iter;

        Eigen::VectorXd step = ls.x - s.x;
        Eigen::VectorXd dgrad = ls.grad - s.grad;
        const double sy = step.dot(dgrad);
        if (sy > 1e-10 * step.norm() * dgrad.norm()) {
            if (static_cast<int>(s_hist.size()) == config.history) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
            s_hist.push_back(std::move(step));
            y_hist.push_back(std::move(dgrad));
            rho_hist.push_back(1.0 / sy);
        }
        s = SolverState{std::move(ls.x), ls.value, std::move(ls.grad)};

        const std::optional<double> bound = certs.maybe(iter, s.x);
        out.trace.push_back({iter, seconds_since(start), s.value, s.grad.norm(), bound});
        values.push_back(s.value);
        if (certs.satisfied(bound)) {
            out.termination = Termination::certificate;
            break;
        }
        if (s.grad.norm() > config.grad_tol &&
            relative_stall(values, config.f_rel_window, config.f_rel_tol)) {
            out.termination = Termination::f_rel_tol;
            break;
        }
    }
    out.x = s.x;
    out.value = s.value;
    out.grad_norm = s.grad.norm();
    out.iterations = iter;
    return out;
}

SolveResult accgd_solve(const PackedObjective& f, const Eigen::VectorXd& x0,
                        const SolverConfig& config, const CertificateCallback& certificate) {
    config.validate();
    const auto start = Clock::now();
    const CertificateSchedule certs(config, certificate);
    constexpr int kMaxHalvings = 60;

    SolverState u{x0, 0.0, Eigen::VectorXd(x0.size())};
    u.value = f(u.x, u.grad);
    if (!std::isfinite(u.value)) throw DomainError("objective is not finite at the initial point");
    SolverState v = u;
    SolverState best = u;

    SolveResult out{u.x, u.value, u.grad.norm(), {}, Termination::max_iters, 0, 1};
    out.trace.push_back({0, seconds_since(start), u.value, u.grad.norm(), certs.maybe(0, u.x)});
    std::vector<double> values{u.value};

    int iter = 0;
    while (true) {
        if (u.grad.norm() <= config.grad_tol) {
            out.termination = Termination::grad_tol;
            break;
        }
        if (iter >= config.max_iters) {
            out.termination = Termination::max_iters;
            break;
        }

        double eta = config.step_size;
        SolverState next{v.x - eta * v.grad, 0.0, Eigen::VectorXd(x0.size())};
        next.value = f(next.x, next.grad);
        ++out.evaluations;
        bool reset = false;
        for (int h = 0; !std::isfinite(next.value) && h < kMaxHalvings; ++h) {
            eta *= 0.5;
            reset = true;
            next.x = v.x - eta * v.grad;
            next.value = f(next.x, next.grad);
            ++out.evaluations;
        }
        if (!std::isfinite(next.value)) {
            out.termination = Termination::line_search_failure;
            break;
        }

        const double theta = config.momentum_override.value_or(static_cast<double>(iter) / (iter + 3));
        ++iter;
        if (reset || theta == 0.0) {
            v = next;
        } else {
            SolverState w{next.x + theta * (next.x - u.x), 0.0, Eigen::VectorXd(x0.size())};
            w.value = f(w.x, w.grad);
            ++out.evaluations;
            v = std::isfinite(w.value) ? std::move(w) : next;
        }
        u = std::move(next);
        if (u.value < best.value) best = u;

        const std::optional<double> bound = certs.maybe(iter, u.x);
        out.trace.push_back({iter, seconds_since(start), u.value, u.grad.norm(), bound});
        values.push_back(u.value);
        if (certs.satisfied(bound)) {
            out.termination = Termination::certificate;
            break;
        }
        if (u.grad.norm() > config.grad_tol &&
            relative_stall(values, config.f_rel_window, config.f_rel_tol)) {
            out.termination = Termination::f_rel_tol;
            break;
        }
    }
    out.x = best.x;
    out.value = best.value;
    out.grad_norm = best.grad.norm();
    out.iterations = iter;
    return out;
}

SolveResult solve(const PackedObjective& f, const Eigen::VectorXd& x0, const SolverConfig& config,
                  const CertificateCallback& certificate) {
    return config.method == SolverMethod::lbfgs ? lbfgs_solve(f, x0, config, certificate)
                                                : accgd_solve(f, x0, config, certificate);
}

void write_trace_csv(std::ostream& os, const SolveResult& result, bool with_time) {
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf;
    };
    os << "iter,seconds,objective,grad_norm,bound\n";
    for (const TraceRow& row : result.trace) {
        os << row.iter << ',';
        if (with_time) put(row.seconds);
        os << ',';
        put(row.objective);
        os << ',';
        put(row.grad_norm);
        os << ',';
        if (row.bound) put(*row.bound);
        os << '\n';
    }
}

} // namespace qst
