#ifndef PRONYKIT_FOURIER_HPP
#define PRONYKIT_FOURIER_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pronykit/types.hpp"

namespace pronykit
{

///
/// Piecewise-smooth function on [-pi, pi) written as f = Phi + Psi:
///
///   Phi(x) = sum_j sum_l a_{l,j} V_l(x; xi_j),
///   V_n(x; xi) = -(2 pi)^n / (n+1)! B_{n+1}((x - xi) / 2 pi),  xi <= x < xi + 2 pi,
///
/// extended periodically, and Psi a real trigonometric polynomial given by its
/// coefficients c_0..c_L (c_{-k} = conj(c_k)).
///
struct PiecewiseModel
{
    std::vector<double> jumps;                   // xi_j in [-pi, pi)
    std::vector<std::vector<double>> magnitudes; // magnitudes[j][l] = a_{l,j}
    std::vector<Complex> smooth;                 // c_k(Psi), k = 0..L

    /// Largest derivative order d carried by any jump (-1 without jumps).
    int order() const;
};

/// Fourier coefficients c_k, k = 0..M_total, of a real function.
struct FourierData
{
    std::vector<Complex> coeffs;
    int M = 0;      // reconstruction budget
    double R = 0.0; // decay bound |c_k(Psi)| <= R k^{-d-2}

    int total() const { return static_cast<int>(coeffs.size()) - 1; }
};

struct JumpEstimate
{
    double xi = 0.0;
    std::vector<double> magnitudes; // a_0..a_p
    Complex root;                   // selected root (omega, or omega^N when decimated)
    double root_residual = 0.0;     // |p(root)| / max |coefficient|
    int branch = 0;                 // chosen N-th root branch (0 for half order)
};

/// B_n(x), with B_1(x) = x - 1/2.
double bernoulli_poly(int n, double x);

/// Wraps an angle to [-pi, pi).
double wrap_angle(double x);

double phi_eval(const PiecewiseModel& model, double x);

/// Psi(x) summed over k = -L..L; the imaginary part is the round-off of a
/// real series.
Complex psi_eval(const PiecewiseModel& model, double x);

/// Phi(x) + Re Psi(x).
double model_eval(const PiecewiseModel& model, double x);

/// c_k(Phi) = 1/(2 pi) sum_j e^{-ik xi_j} sum_l (ik)^{-l-1} a_{l,j}; k != 0.
Complex phi_fourier(const PiecewiseModel& model, int k);

struct EnvelopeNoise
{
    double R = 0.0;
    int d = 0;
    std::uint64_t seed = 0;
};

/// c_k(f) = c_k(Phi) + c_k(Psi), k = 0..M_total, plus optional noise uniform
/// in the complex disk of radius R k^{-d-2} for k >= 1.
FourierData synthesize_fourier(const PiecewiseModel& model, int M_total,
                               const std::optional<EnvelopeNoise>& noise = std::nullopt);

/// Random smooth part saturating the envelope: c_k = R k^{-d-2} u_k with u_k
/// uniform in the unit disk (k >= 1), c_0 real and |c_0| <= R.
std::vector<Complex> envelope_smooth_part(int L, int d, double R, std::uint64_t seed);

/// 2 pi (i k)^{power} c_k.
Complex scaled_sample(const FourierData& data, int k, int power);

/// First-order jump locations from 2K consecutive samples k = M-2K+1..M.
/// Throws Error(PronyFailure).
std::vector<double> prony_order0_jumps(const FourierData& data, int K);

/// C-infinity bump equal to 1 on |x| <= J/3 and 0 for |x| >= J (J capped at pi).
double bump_eval(double J, double x);

/// Fourier coefficients c_m of the bump centred at 0, m = 0..max_m (real,
/// even in m). Cached per (J, table size).
std::vector<double> bump_coefficients(double J, int max_m);

/// First M+1 coefficients of f * h, h the bump centred at xi, by discrete
/// convolution over |l| <= min(3M, M_total).
FourierData localize_jump(const FourierData& data, double xi, double J);

/// How the root of the elimination polynomial is chosen.
enum class RootSelection
{
    NearestCircle, // min |1 - |z||, ties by largest |p'(z)|
    Any,           // first root returned by the root finder
};

/// Single-jump recovery from the d1+2 consecutive samples k = M-d1-1..M.
/// Throws Error(NoRootNearCircle).
JumpEstimate halforder_single_jump(const FourierData& data, int d1, int M);

/// q(u) = sum_{j=0}^{d+1} (-1)^j C(d+1, j) mt[j] u^{d+1-j}, where
/// mt = (m_N, m_2N, ..., m_{(d+2)N}). Coefficients lowest degree first.
std::vector<Complex> decimated_polynomial(std::span<const Complex> mt, int d);

struct FullOrderOptions
{
    RootSelection selection = RootSelection::NearestCircle;
    /// When set, BranchAmbiguity is raised if a second N-th-root branch lies
    /// within this distance of the prior.
    std::optional<double> prior_uncertainty;
};

/// Decimated single-jump recovery at order d with N = floor(M/(d+2)).
/// Throws Error(NoRootNearCircle) or Error(BranchAmbiguity).
JumpEstimate fullorder_single_jump(const FourierData& data, int d, int M, double prior_xi,
                                   const FullOrderOptions& opts = {});

struct ReconstructParams
{
    int d = 0;
    int K = 1;
    double J = 1.0;
    double A = 1.0;
    double B = 1.0;
    double R = 1.0;
};

enum class ReconstructMode
{
    Half,
    Full,
};

struct Reconstruction
{
    /// Estimated jumps/magnitudes; `smooth` holds c_k(f) - c_k(Phi~) for
    /// k <= M, so model_eval(estimate, x) is the reconstruction f~(x).
    PiecewiseModel estimate;
    std::vector<JumpEstimate> details;
    std::vector<double> initial_jumps; // first-order estimates
};

/// Errors carry the offending jump index in their message.
Reconstruction reconstruct(const FourierData& data, const ReconstructParams& params,
                           ReconstructMode mode);

} // namespace pronykit

#endif
