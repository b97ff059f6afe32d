#include "bpgof/alternatives.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace bpgof {

namespace {

constexpr std::uint32_t kSlbMaxDiagonal = 3000;

template <class... Fs>
struct overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

double xlogy(double k, double x)
{
    return k == 0.0 ? 0.0 : k * std::log(x);
}

bool finite_all(std::initializer_list<double> xs)
{
    return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

std::string fmt(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

AltMoments finish(double m1, double m2, double v1, double v2, double c)
{
    return {m1, m2, v1, v2, c, v1 / m1, v2 / m2, c / std::sqrt(v1 * v2)};
}

unsigned as_count(double x, const char* what)
{
    if (!(x >= 1.0) || x != std::floor(x) || x > 1e6) {
        throw std::invalid_argument(std::string(what) + " must be a positive integer");
    }
    return static_cast<unsigned>(x);
}

} // namespace

void validate(const AltSpec& spec)
{
    std::visit(overloaded{
                   [](const BBSpec& s) {
                       if (s.m < 1 || !finite_all({s.p1, s.p2, s.p3}) || !(s.p3 > 0.0) || s.p1 < s.p3 ||
                           s.p2 < s.p3 || s.p1 + s.p2 - s.p3 > 1.0) {
                           throw std::invalid_argument("BB needs m >= 1, p1,p2 >= p3 > 0 and p1+p2-p3 <= 1");
                       }
                   },
                   [](const BNBSpec& s) {
                       if (s.nu < 1 || !finite_all({s.g0, s.g1, s.g2}) || !(s.g2 > 0.0) || !(s.g0 > s.g2) ||
                           !(s.g1 > s.g2)) {
                           throw std::invalid_argument("BNB needs nu >= 1 and g0,g1 > g2 > 0");
                       }
                   },
                   [](const PPBSpec& s) {
                       if (!(s.p > 0.0 && s.p < 1.0) || !s.a.valid() || !s.b.valid()) {
                           throw std::invalid_argument("PPB needs 0 < p < 1 and two valid theta triples");
                       }
                   },
                   [](const NTABSpec& s) {
                       const double t = s.l1 + s.l2 + s.l3;
                       if (!finite_all({s.lambda, s.l1, s.l2, s.l3}) || !(s.lambda > 0.0) || s.l1 < 0.0 ||
                           s.l2 < 0.0 || s.l3 < 0.0 || !(t > 0.0) || t > 1.0) {
                           throw std::invalid_argument("NTAB needs lambda > 0, l_k >= 0 and 0 < l1+l2+l3 <= 1");
                       }
                   },
                   [](const SLBSpec& s) {
                       const double t = s.l1 + s.l2 + s.l3;
                       if (!finite_all({s.l1, s.l2, s.l3}) || s.l1 < 0.0 || s.l2 < 0.0 || s.l3 < 0.0 ||
                           !(t > 0.0) || !(t < 1.0)) {
                           throw std::invalid_argument("SLB needs l_k >= 0 and 0 < l1+l2+l3 < 1");
                       }
                   },
               },
               spec);
}

std::string describe(const AltSpec& spec)
{
    return std::visit(
        overloaded{
            [](const BBSpec& s) {
                return "BB(" + std::to_string(s.m) + ";" + fmt(s.p1) + "," + fmt(s.p2) + "," + fmt(s.p3) + ")";
            },
            [](const BNBSpec& s) {
                return "BNB(" + std::to_string(s.nu) + ";" + fmt(s.g0) + "," + fmt(s.g1) + "," + fmt(s.g2) + ")";
            },
            [](const PPBSpec& s) {
                return "PPB(" + fmt(s.p) + ";(" + fmt(s.a.theta1) + "," + fmt(s.a.theta2) + "," + fmt(s.a.theta3) +
                       ");(" + fmt(s.b.theta1) + "," + fmt(s.b.theta2) + "," + fmt(s.b.theta3) + "))";
            },
            [](const NTABSpec& s) {
                return "NTAB(" + fmt(s.lambda) + ";" + fmt(s.l1) + "," + fmt(s.l2) + "," + fmt(s.l3) + ")";
            },
            [](const SLBSpec& s) { return "SLB(" + fmt(s.l1) + "," + fmt(s.l2) + "," + fmt(s.l3) + ")"; },
        },
        spec);
}

AltSpec make_alt(std::string_view name, const std::vector<double>& p)
{
    std::string dist(name);
    std::transform(dist.begin(), dist.end(), dist.begin(), [](unsigned char ch) { return std::tolower(ch); });
    auto need = [&](std::size_t k) {
        if (p.size() != k) {
            throw std::invalid_argument(dist + " takes " + std::to_string(k) + " parameters, got " +
                                        std::to_string(p.size()));
        }
    };
    AltSpec spec;
    if (dist == "bb") {
        need(4);
        spec = BBSpec{as_count(p[0], "BB m"), p[1], p[2], p[3]};
    } else if (dist == "bnb") {
        need(4);
        spec = BNBSpec{as_count(p[0], "BNB nu"), p[1], p[2], p[3]};
    } else if (dist == "ppb") {
        need(7);
        spec = PPBSpec{p[0], {p[1], p[2], p[3]}, {p[4], p[5], p[6]}};
    } else if (dist == "ntab") {
        need(4);
        spec = NTABSpec{p[0], p[1], p[2], p[3]};
    } else if (dist == "slb") {
        need(3);
        spec = SLBSpec{p[0], p[1], p[2]};
    } else {
        throw std::invalid_argument("unknown alternative '" + std::string(dist) + "'");
    }
    validate(spec);
    return spec;
}

std::vector<SlbCell> slb_pmf(const SLBSpec& s, double tail)
{
    validate(AltSpec{s});
    const double delta = s.l1 + s.l2 + s.l3;
    const double lead = -1.0 / std::log1p(-delta);
    std::vector<SlbCell> cells;
    double mass = 0.0;
    for (std::uint32_t t = 1; t <= kSlbMaxDiagonal; ++t) {
        for (std::uint32_t r = 0; r <= t; ++r) {
            const std::uint32_t q = t - r;
            double p = 0.0;
            for (std::uint32_t j = 0; j <= std::min(r, q); ++j) {
                if (j > 0 && s.l3 == 0.0) break;
                if ((r - j > 0 && s.l1 == 0.0) || (q - j > 0 && s.l2 == 0.0)) continue;
                const double lt = std::lgamma(static_cast<double>(t - j)) - std::lgamma(r - j + 1.0) -
                                  std::lgamma(q - j + 1.0) - std::lgamma(j + 1.0) + xlogy(r - j, s.l1) +
                                  xlogy(q - j, s.l2) + xlogy(j, s.l3);
                p += std::exp(lt);
            }
            p *= lead;
            if (p > 0.0) {
                cells.push_back({r, q, p});
                mass += p;
            }
        }
        if (mass >= 1.0 - tail) {
            return cells;
        }
    }
    throw std::invalid_argument("SLB: l1+l2+l3 too close to 1 for the pmf table");
}

AltMoments alt_moments(const AltSpec& spec)
{
    validate(spec);
    return std::visit(
        overloaded{
            [](const BBSpec& s) {
                const double m = s.m;
                return finish(m * s.p1, m * s.p2, m * s.p1 * (1.0 - s.p1), m * s.p2 * (1.0 - s.p2),
                              m * (s.p3 - s.p1 * s.p2));
            },
            [](const BNBSpec& s) {
                const double nu = s.nu;
                return finish(nu * s.g0, nu * s.g1, nu * s.g0 * (1.0 + s.g0), nu * s.g1 * (1.0 + s.g1),
                              nu * (s.g2 + s.g0 * s.g1));
            },
            [](const PPBSpec& s) {
                const double p = s.p, q = 1.0 - s.p;
                const auto& a = s.a;
                const auto& b = s.b;
                const double m1 = p * a.theta1 + q * b.theta1;
                const double m2 = p * a.theta2 + q * b.theta2;
                const double e11 = p * (a.theta1 * a.theta1 + a.theta1) + q * (b.theta1 * b.theta1 + b.theta1);
                const double e22 = p * (a.theta2 * a.theta2 + a.theta2) + q * (b.theta2 * b.theta2 + b.theta2);
                const double e12 = p * (a.theta1 * a.theta2 + a.theta3) + q * (b.theta1 * b.theta2 + b.theta3);
                return finish(m1, m2, e11 - m1 * m1, e22 - m2 * m2, e12 - m1 * m2);
            },
            [](const NTABSpec& s) {
                const double c1 = s.l1 + s.l3, c2 = s.l2 + s.l3;
                return finish(s.lambda * c1, s.lambda * c2, s.lambda * (c1 + c1 * c1), s.lambda * (c2 + c2 * c2),
                              s.lambda * (c1 * c2 + s.l3));
            },
            [](const SLBSpec& s) {
                double m1 = 0, m2 = 0, e11 = 0, e22 = 0, e12 = 0, mass = 0;
                for (const auto& c : slb_pmf(s, 1e-14)) {
                    mass += c.p;
                    m1 += c.r * c.p;
                    m2 += c.s * c.p;
                    e11 += static_cast<double>(c.r) * c.r * c.p;
                    e22 += static_cast<double>(c.s) * c.s * c.p;
                    e12 += static_cast<double>(c.r) * c.s * c.p;
                }
                m1 /= mass;
                m2 /= mass;
                e11 /= mass;
                e22 /= mass;
                e12 /= mass;
                return finish(m1, m2, e11 - m1 * m1, e22 - m2 * m2, e12 - m1 * m2);
            },
        },
        spec);
}

AltSampler::AltSampler(AltSpec spec) : spec_(std::move(spec))
{
    validate(spec_);
    if (const auto* s = std::get_if<SLBSpec>(&spec_)) {
        slb_cells_ = slb_pmf(*s);
        slb_cum_.reserve(slb_cells_.size());
        double acc = 0.0;
        for (const auto& c : slb_cells_) {
            acc += c.p;
            slb_cum_.push_back(acc);
        }
    }
}

BivariateCountSample AltSampler::sample(std::size_t n, Rng& rng) const
{
    std::vector<std::uint32_t> x1(n), x2(n);
    std::visit(overloaded{
                   [&](const BBSpec& s) {
                       const double c11 = s.p3, c10 = s.p1 - s.p3, c01 = s.p2 - s.p3;
                       for (std::size_t i = 0; i < n; ++i) {
                           std::uint32_t a = 0, b = 0;
                           for (unsigned t = 0; t < s.m; ++t) {
                               const double u = rng.uniform();
                               if (u < c11) {
                                   ++a;
                                   ++b;
                               } else if (u < c11 + c10) {
                                   ++a;
                               } else if (u < c11 + c10 + c01) {
                                   ++b;
                               }
                           }
                           x1[i] = a;
                           x2[i] = b;
                       }
                   },
                   [&](const BNBSpec& s) {
                       for (std::size_t i = 0; i < n; ++i) {
                           const double g = rng.gamma_int(s.nu);
                           const auto y1 = rng.poisson((s.g0 - s.g2) * g);
                           const auto y2 = rng.poisson((s.g1 - s.g2) * g);
                           const auto y3 = rng.poisson(s.g2 * g);
                           x1[i] = static_cast<std::uint32_t>(y1 + y3);
                           x2[i] = static_cast<std::uint32_t>(y2 + y3);
                       }
                   },
                   [&](const PPBSpec& s) {
                       for (std::size_t i = 0; i < n; ++i) {
                           const ThetaBP& th = rng.bernoulli(s.p) ? s.a : s.b;
                           const auto y1 = rng.poisson(th.lambda1());
                           const auto y2 = rng.poisson(th.lambda2());
                           const auto y3 = rng.poisson(th.theta3);
                           x1[i] = static_cast<std::uint32_t>(y1 + y3);
                           x2[i] = static_cast<std::uint32_t>(y2 + y3);
                       }
                   },
                   [&](const NTABSpec& s) {
                       // N clusters of independent Poisson parts sum to Poisson(N l) parts
                       for (std::size_t i = 0; i < n; ++i) {
                           const double k = static_cast<double>(rng.poisson(s.lambda));
                           const auto y1 = rng.poisson(k * s.l1);
                           const auto y2 = rng.poisson(k * s.l2);
                           const auto y3 = rng.poisson(k * s.l3);
                           x1[i] = static_cast<std::uint32_t>(y1 + y3);
                           x2[i] = static_cast<std::uint32_t>(y2 + y3);
                       }
                   },
                   [&](const SLBSpec&) {
                       const double total = slb_cum_.back();
                       for (std::size_t i = 0; i < n; ++i) {
                           const double u = rng.uniform() * total;
                           auto it = std::upper_bound(slb_cum_.begin(), slb_cum_.end(), u);
                           if (it == slb_cum_.end()) --it;
                           const auto& c = slb_cells_[static_cast<std::size_t>(it - slb_cum_.begin())];
                           x1[i] = c.r;
                           x2[i] = c.s;
                       }
                   },
               },
               spec_);
    return BivariateCountSample(std::move(x1), std::move(x2));
}

BivariateCountSample sample_alt(const AltSpec& spec, std::size_t n, Rng& rng)
{
    return AltSampler(spec).sample(n, rng);
}

} // namespace bpgof
