#pragma once

#include <string>
#include <vector>

#include "truchet/cocycle.hpp"
#include "truchet/params.hpp"
#include "truchet/scalar.hpp"

namespace truchet::params {

class search_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DecayStage {
  long long j = 0;
  Scalar eps;
  BigInt k;
  bool swapped = false;       // stage verified in the rightward-to-upward orientation
  Scalar margin;              // minimal verified slack of the stage inequality
  std::string inequality;     // human-readable record of what was verified
};

struct DecaySchedule {
  Scalar eta;
  std::vector<Scalar> eps_seq;
  std::vector<BigInt> k_schedule;
  std::vector<long long> marks;        // a_0 = 0, a_{j+1} = a_j + k_j + 1
  std::vector<DecayStage> stages;
  Scalar verified_product;             // prod_{j <= J} (1 - eps_j), exact
  Scalar ns_lower_bound;               // verified_product * (1 - sum_{j > J} eps_j)
};

/// Chooses the halving schedule eps_j = eta 2^{-j-1} and the minimal block
/// lengths k_j making every stage inequality hold:
///   stage 0:  4 * alpha_max * beta_max < eps_0 over the k_0-upward box,
///             so nu(O_1) = 1 - 4 alpha beta > 1 - eps_0;
///   stage j:  the decay inequality for the k_{j-1} block followed by the
///             k_j block, verified exactly over the whole successor box.
/// The certificate records each verified inequality and its margin.
inline DecaySchedule decay_schedule(const Scalar& eta, long long stage_count = 4,
                                    long long k_cap = 1 << 20) {
  if (eta.sign() <= 0 || eta >= Scalar(1)) throw scalar_error("decay_schedule: eta outside (0,1)");
  if (stage_count < 1) throw scalar_error("decay_schedule: need at least one stage");
  DecaySchedule out;
  out.eta = eta;
  Scalar half_pow = eta;
  for (long long j = 0; j < stage_count; ++j) {
    half_pow = half_pow / Scalar(2);
    out.eps_seq.push_back(half_pow);  // eta * 2^{-j-1}
  }

  // stage 0: the period-4 mass over the k0-upward box is at most
  // 4 * (3/(8+6k)) * ((3+2k)/(8+6k))
  {
    const Scalar& eps0 = out.eps_seq[0];
    BigInt k = 1;
    for (;; ++k) {
      if (k > k_cap)
        throw search_error("decay_schedule: stage-0 block search exceeded the cap");
      Box box = upward_box(k);
      Scalar mass = Scalar(4) * box.alpha_hi * box.beta_hi;
      if (mass < eps0) {
        out.k_schedule.push_back(k);
        out.stages.push_back({0, eps0, k, false, eps0 - mass,
                              "4*alpha_max*beta_max = " + mass.str() + " < eps_0 = " + eps0.str()});
        break;
      }
    }
  }

  for (long long j = 1; j < stage_count; ++j) {
    const Scalar& eps = out.eps_seq[static_cast<size_t>(j)];
    const BigInt& prev = out.k_schedule.back();
    bool swapped = (j % 2 == 0);  // even stages run rightward -> upward
    BigInt k = 1;
    for (;; ++k) {
      if (k > k_cap) throw search_error("decay_schedule: stage " + std::to_string(j) +
                                        " block search exceeded the cap");
      auto chk = cocycle::decay_inequality_check(prev, k, eps, swapped);
      if (chk.holds) {
        out.k_schedule.push_back(k);
        out.stages.push_back({j, eps, k, swapped, chk.min_margin,
                              "entrywise w > (1-eps) v over the k'=" + k.str() +
                                  " successor box, min margin " + chk.min_margin.str()});
        break;
      }
    }
  }

  out.marks.push_back(0);
  for (const BigInt& k : out.k_schedule)
    out.marks.push_back(out.marks.back() + k.convert_to<long long>() + 1);

  out.verified_product = Scalar(1);
  for (const Scalar& e : out.eps_seq) out.verified_product *= Scalar(1) - e;
  // the tail of the halving schedule satisfies sum_{j > J} eps_j = eta 2^{-J-1}
  out.ns_lower_bound = out.verified_product * (Scalar(1) - out.eps_seq.back());
  return out;
}

struct SmallMeasureConstruction {
  DecaySchedule schedule;
  UnderstandablePair itinerary;
  Enclosure alpha_enclosure, beta_enclosure;
};

/// The full small-periodic-measure construction: schedule, understandable
/// itinerary, and certified rational enclosures of the coded pair.
inline SmallMeasureConstruction construct_small_measure(const Scalar& eta,
                                                        long long stage_count = 4,
                                                        long long k_cap = 1 << 20) {
  SmallMeasureConstruction out;
  out.schedule = decay_schedule(eta, stage_count, k_cap);
  out.itinerary = understandable_itinerary(out.schedule.k_schedule);
  out.alpha_enclosure = param_from_itinerary(out.itinerary.alpha);
  out.beta_enclosure = param_from_itinerary(out.itinerary.beta);
  return out;
}

}  // namespace truchet::params
