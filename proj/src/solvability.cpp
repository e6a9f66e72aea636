#include "pronykit/solvability.hpp"

#include <algorithm>
#include <cmath>

namespace pronykit
{

HankelPencil build_hankel(const MomentSequence& mu)
{
    if (mu.values.empty() || mu.values.size() % 2 != 0)
        throw Error(ErrorCode::InvalidInput,
                    "build_hankel: moment sequence must have even length >= 2");
    const auto d = static_cast<Eigen::Index>(mu.values.size() / 2);
    HankelPencil h;
    h.full.resize(d, d + 1);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j <= d; ++j)
            h.full(i, j) = mu.values[static_cast<std::size_t>(i + j)];
    return h;
}

SolvabilityReport classify(const MomentSequence& mu, double rank_tol)
{
    const HankelPencil h = build_hankel(mu);
    SolvabilityReport rep;

    Eigen::JacobiSVD<CMatrix> svd(h.full);
    const Eigen::VectorXd& sv = svd.singularValues();
    rep.singular_values.assign(sv.data(), sv.data() + sv.size());

    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    if (smax == 0.0)
    {
        rep.rank = 0;
        rep.solvable = true;
        rep.stratum = Stratum::Solvable;
        rep.leading_minor = 0.0;
        return rep;
    }

    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > rank_tol * smax)
            ++r;
    rep.rank = r;

    const CMatrix Mr = h.square_minor(r);
    rep.leading_minor = std::abs(Mr.fullPivLu().determinant());

    double scale = 1.0;
    for (int i = 0; i < r; ++i)
        scale *= sv(i);
    rep.solvable = rep.leading_minor > rank_tol * scale;
    rep.stratum = rep.solvable ? Stratum::Solvable : Stratum::Unsolvable;
    return rep;
}

EscapeReport escape_diagnostic(const std::vector<SpikeSignal>& path, int order_d,
                               const EscapeOptions& opts)
{
    if (path.size() < 3)
        throw Error(ErrorCode::InvalidInput,
                    "escape_diagnostic: need at least three solutions along the path");
    EscapeReport rep;
    const int power = 2 * order_d - 1;
    for (const auto& f : path)
    {
        double mx = 0.0;
        double weight_of_max = 0.0;
        std::vector<double> weights;
        for (std::size_t j = 0; j < f.nodes.size(); ++j)
        {
            const double mag = std::abs(f.nodes[j]);
            const double w = std::abs(f.coeffs[j].back() * int_pow(f.nodes[j], power));
            weights.push_back(w);
            if (mag >= mx)
            {
                mx = mag;
                weight_of_max = w;
            }
        }
        rep.max_node_magnitude.push_back(mx);
        rep.escaping_weight.push_back(weight_of_max);
        rep.node_weights.push_back(std::move(weights));
    }
    const auto& m = rep.max_node_magnitude;
    const bool increasing = std::is_sorted(m.begin(), m.end()) && m.back() > m.front();
    rep.escape_detected = increasing && m.back() > opts.threshold;
    return rep;
}

} // namespace pronykit
