#pragma once

#include <string>
#include <vector>

#include "chemotax/errors.hpp"
#include "chemotax/model.hpp"

namespace chemotax {
namespace theory {

/// The five structural hypotheses on the exponents, all strict:
///   A1: m2+k < m3+l     A2: m2+k < r       A3: m2+k < m1+2/n
///   A4: m3+l < r        A5: m3+l < m1+2/n
struct AssumptionSet {
    bool a1 = false;
    bool a2 = false;
    bool a3 = false;
    bool a4 = false;
    bool a5 = false;

    bool operator==(const AssumptionSet&) const = default;
};

AssumptionSet check_assumptions(double m1, double m2, double m3,
                                double k, double l, double r, int n);

enum class Verdict { bounded, not_covered };

/// Outcome of the boundedness criteria for one parameter tuple.
/// A not_covered verdict makes no claim: it only means the implemented
/// criteria do not certify boundedness.
struct RegimeReport {
    AssumptionSet assumptions;
    Verdict verdict = Verdict::not_covered;
    std::string criterion;                // "tau0" or "tau1" rule applied
    std::vector<std::string> witnesses;   // satisfied assumptions, e.g. {"A2","A5"}
    std::string notes;                    // informational only

    bool bounded() const { return verdict == Verdict::bounded; }
    std::string witness_string() const;   // "A2+A5", empty if none
};

/// tau=0 (local or nonlocal): bounded iff A1 or A2 or A3.
/// tau=1 (local):             bounded iff (A2 or A3) and (A4 or A5).
/// Refuses test-mode specs with lambda=0 or mu=0.
RegimeReport classify(const ValidatedModel& model);

/// Uniform-in-time bound on the total mass:
/// M = max{ initial_mass, (lambda/mu * |Omega|^(r-1))^(1/(r-1)) }.
double mass_bound(double lambda, double mu, double r,
                  double omega_measure, double initial_mass);

// ---------------------------------------------------------------------------
// Gagliardo-Nirenberg interpolation exponents
// ---------------------------------------------------------------------------

/// Relations that must land in (0,1) for the a priori estimates. Bit flags so
/// callers can demand subsets. The theta2 pair is meaningful only for l > 1.
enum Relation : unsigned {
    rel_theta         = 1u << 0, // 0 < theta < 1
    rel_sigma_theta   = 1u << 1, // 0 < sigma*theta/2 < 1
    rel_theta1        = 1u << 2, // 0 < theta1 < 1
    rel_sigma1_theta1 = 1u << 3, // 0 < sigma1*theta1/2 < 1
    rel_theta2        = 1u << 4, // 0 < theta2 < 1         (l > 1 only)
    rel_sigma1_theta2 = 1u << 5, // 0 < sigma1*theta2/2 < 1 (l > 1 only)
    rel_theta4        = 1u << 6, // 0 < theta4 < 1
    rel_sigma2_theta4 = 1u << 7, // 0 < sigma2*theta4/2 < 1
    rel_theta3        = 1u << 8, // 0 < theta3 < 1
};

inline constexpr unsigned all_relations = 0x1FFu;

const char* relation_name(Relation rel);

/// Interpolation exponents at a given Lebesgue index p (and auxiliary q):
///   theta  = (h - h/(p+m2+k-1)) / d      sigma  = 2(p+m2+k-1)/(p+m1-1)
///   theta1 = (h - h/(p+m3+l-1)) / d      sigma1 = 2(p+m3+l-1)/(p+m1-1)
///   theta2 = (h - h/l) / d               theta3 = (h - h/p) / d
///   theta4 = (h - h/q) / d               sigma2 = 2(p+q)/(p+m1-1)
/// with h = (p+m1-1)/2 and d = h - 1/2 + 1/n.
struct ExponentSet {
    double p = 0.0;
    double q = 0.0;
    double theta = 0.0;
    double sigma = 0.0;
    double theta1 = 0.0;
    double sigma1 = 0.0;
    double theta2 = 0.0; // NaN when l <= 1
    double theta3 = 0.0;
    double theta4 = 0.0;
    double sigma2 = 0.0;
    bool has_theta2 = false; // l > 1
    unsigned holding = 0;    // Relation bits that hold at this (p, q)

    bool holds(Relation rel) const { return (holding & rel) != 0; }
};

ExponentSet gn_exponents(double p, double q, int n,
                         double m1, double m2, double m3, double k, double l);

/// The auxiliary integrability index used when l > 1: max{l, m3+l-1} + 1.
double default_q(double l, double m3);

struct PbarOptions {
    double dp = 0.01;      // candidate grid spacing
    double window = 50.0;  // forward verification window (p_bar, p_bar+window]
    int samples = 50;      // verification samples inside the window
    double p_max = 1e4;    // scan ceiling
};

struct PbarResult {
    double pbar = 0.0;
    std::vector<double> certificate; // sampled p where all relations held
};

/// Smallest grid point p_bar = 1 + j*dp such that every required relation
/// holds at p_bar itself and at `samples` log-spaced points in
/// (p_bar, p_bar+window]. Relations in `required` that need l > 1 are ignored
/// when l <= 1. Throws NotFoundWithinScan naming the relation that was still
/// violated at the largest candidate.
PbarResult find_pbar(double q, int n, double m1, double m2, double m3,
                     double k, double l, unsigned required = all_relations,
                     const PbarOptions& options = {});

} // namespace theory
} // namespace chemotax
