#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qng/gaussian_state.hpp"

namespace qng {

/// Bit i set means channel i belongs to the subset.
using ChannelMask = std::uint32_t;
inline constexpr int kMaxChannels = 24;

inline ChannelMask first_channels(int count) {
  return count >= 32 ? ~ChannelMask{0} : (ChannelMask{1} << count) - 1;
}

/// Multi-channel on/off detector: one optical mode split onto N avalanche
/// photodiodes with known splitting ratios and quantum efficiencies.
class DetectorConfig {
 public:
  /// Throws std::invalid_argument unless splitting sums to 1 (within 1e-12),
  /// all entries are nonnegative and efficiencies lie in [0, 1].
  DetectorConfig(std::vector<double> splitting, std::vector<double> efficiencies);

  static DetectorConfig symmetric(int channels);

  int channels() const { return static_cast<int>(splitting_.size()); }
  const std::vector<double>& splitting() const { return splitting_; }
  const std::vector<double>& efficiencies() const { return efficiencies_; }

  /// True for balanced splitting with identical efficiencies; such detectors
  /// admit the size-indexed no-click profile.
  bool is_symmetric() const;
  /// Per-channel transmitted fraction splitting_i * efficiency_i.
  double channel_transmission(int channel) const;

  friend bool operator==(const DetectorConfig&, const DetectorConfig&) = default;

 private:
  std::vector<double> splitting_;
  std::vector<double> efficiencies_;
};

double effective_attenuation(const DetectorConfig& config, ChannelMask subset);
/// Throws std::out_of_range on invalid or repeated indices.
double effective_attenuation(const DetectorConfig& config, std::span<const int> subset);

/**
 * No-click response of a source seen through a detector: S -> R_{0,S}.
 *
 * The profile stores the deficit 1 - R_{0,S} rather than R_{0,S} itself.
 * Inclusion-exclusion sums of deficits cancel far less than sums of
 * probabilities close to one.
 */
class NoClickProfile {
 public:
  using SubsetDeficit = std::function<double(ChannelMask)>;
  using SizeDeficit = std::function<double(int)>;

  static NoClickProfile by_subset(int channels, SubsetDeficit deficit);
  /// For symmetric detectors: the deficit depends on the subset size only.
  static NoClickProfile by_size(int channels, SizeDeficit deficit);

  int channels() const { return channels_; }
  bool size_indexed() const { return static_cast<bool>(by_size_); }

  double deficit(ChannelMask subset) const;
  double deficit_of_size(int k) const;
  double no_click(ChannelMask subset) const { return 1.0 - deficit(subset); }
  double no_click_of_size(int k) const { return 1.0 - deficit_of_size(k); }

 private:
  int channels_ = 0;
  SubsetDeficit by_subset_;
  SizeDeficit by_size_;
};

struct ClickProbabilities {
  int order = 0;
  double success = 0.0;  // R_n: the n designated channels all click
  double error = 0.0;    // R_{n+1}: all n+1 channels click
};

NoClickProfile gaussian_no_click_profile(const SqueezedCoherentParams& state,
                                         const DetectorConfig& config);

/// Tolerance on click probabilities leaving [0, 1] before they are clamped.
inline constexpr double kProbabilitySlack = 1e-12;

/// R for the channels in `group` all clicking, by inclusion-exclusion over
/// its subsets. Throws std::domain_error if the result leaves [0, 1] by more
/// than kProbabilitySlack.
double click_success(const NoClickProfile& profile, ChannelMask group);
/// R_n for the designated group {0, ..., n-1}; the size-indexed fast path is
/// used when the profile provides one.
double click_success(const NoClickProfile& profile, int order);
/// Subset-indexed evaluation even when a size-indexed path exists.
double click_success_by_subsets(const NoClickProfile& profile, int order);

/// (R_n, R_{n+1}) on an (n+1)-channel profile.
ClickProbabilities click_stats(const NoClickProfile& profile, int order);

/// (R_n, R_{n+1}) of a single-mode source given its photon-number
/// distribution. Each photon reaches channel i with probability t_i
/// independently, so every term is nonnegative and tiny probabilities keep
/// full relative precision. Cost grows as 2^(n+1) per photon number on
/// asymmetric detectors.
ClickProbabilities photon_count_click_stats(std::span<const double> photon_distribution,
                                            const DetectorConfig& config, int order);

/**
 * Inclusion-exclusion expanded into weighted attenuations for one detector
 * and criterion order, so that
 *   R_n     = sum_i success_weight_i * d(t_i)
 *   R_{n+1} = sum_i error_weight_i   * d(t_i)
 * for any single-mode source with no-click deficit d(t). Used in the
 * optimizer's inner loop.
 */
struct InclusionExclusionPlan {
  std::vector<double> attenuations;
  std::vector<double> success_weights;
  std::vector<double> error_weights;

  static InclusionExclusionPlan build(const DetectorConfig& config, int order);
};

}  // namespace qng
