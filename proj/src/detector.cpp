#include "qng/detector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "qng/compensated_sum.hpp"

namespace qng {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double sign_for_size(int k) { return (k % 2 == 1) ? 1.0 : -1.0; }

double checked_probability(double p, const char* what) {
  if (!(p >= -kProbabilitySlack && p <= 1.0 + kProbabilitySlack)) {
    throw std::domain_error(std::string(what) + " left [0, 1]: " + std::to_string(p));
  }
  return std::clamp(p, 0.0, 1.0);
}


}  // namespace

DetectorConfig::DetectorConfig(std::vector<double> splitting, std::vector<double> efficiencies)
    : splitting_(std::move(splitting)), efficiencies_(std::move(efficiencies)) {
  if (splitting_.empty()) throw std::invalid_argument("detector needs at least one channel");
  if (splitting_.size() > static_cast<std::size_t>(kMaxChannels)) {
    throw std::invalid_argument("detector supports at most " + std::to_string(kMaxChannels) +
                                " channels");
  }
  if (splitting_.size() != efficiencies_.size()) {
    throw std::invalid_argument("splitting and efficiencies must have one entry per channel");
  }
  CompensatedSum total;
  for (double s : splitting_) {
    if (!(s >= 0.0 && std::isfinite(s))) throw std::invalid_argument("negative splitting ratio");
    total += s;
  }
  if (std::abs(total.value() - 1.0) > 1e-12) {
    throw std::invalid_argument("splitting ratios must sum to 1");
  }
  for (double e : efficiencies_) {
    if (!(e >= 0.0 && e <= 1.0)) throw std::invalid_argument("efficiency outside [0, 1]");
  }
}

DetectorConfig DetectorConfig::symmetric(int channels) {
  if (channels < 1) throw std::invalid_argument("detector needs at least one channel");
  return DetectorConfig(std::vector<double>(channels, 1.0 / channels),
                        std::vector<double>(channels, 1.0));
}

bool DetectorConfig::is_symmetric() const {
  return std::all_of(splitting_.begin(), splitting_.end(),
                     [&](double s) { return s == splitting_.front(); }) &&
         std::all_of(efficiencies_.begin(), efficiencies_.end(),
                     [&](double e) { return e == efficiencies_.front(); });
}

double DetectorConfig::channel_transmission(int channel) const {
  return splitting_.at(channel) * efficiencies_.at(channel);
}

double effective_attenuation(const DetectorConfig& config, ChannelMask subset) {
  const int n = config.channels();
  if (subset & ~first_channels(n)) throw std::out_of_range("channel index out of range");
  if (config.is_symmetric()) {
    return std::popcount(subset) * config.channel_transmission(0);
  }
  CompensatedSum t;
  for (int i = 0; i < n; ++i) {
    if (subset & (ChannelMask{1} << i)) t += config.channel_transmission(i);
  }
  return std::min(t.value(), 1.0);
}

double effective_attenuation(const DetectorConfig& config, std::span<const int> subset) {
  ChannelMask mask = 0;
  for (int i : subset) {
    if (i < 0 || i >= config.channels()) {
      throw std::out_of_range("channel index " + std::to_string(i) + " out of range");
    }
    const ChannelMask bit = ChannelMask{1} << i;
    if (mask & bit) throw std::out_of_range("channel index " + std::to_string(i) + " repeated");
    mask |= bit;
  }
  return effective_attenuation(config, mask);
}

NoClickProfile NoClickProfile::by_subset(int channels, SubsetDeficit deficit) {
  NoClickProfile p;
  p.channels_ = channels;
  p.by_subset_ = std::move(deficit);
  return p;
}

NoClickProfile NoClickProfile::by_size(int channels, SizeDeficit deficit) {
  NoClickProfile p;
  p.channels_ = channels;
  p.by_size_ = std::move(deficit);
  return p;
}

double NoClickProfile::deficit(ChannelMask subset) const {
  if (subset & ~first_channels(channels_)) throw std::out_of_range("subset outside the profile");
  if (subset == 0) return 0.0;
  if (by_size_) return by_size_(std::popcount(subset));
  return by_subset_(subset);
}

double NoClickProfile::deficit_of_size(int k) const {
  if (!by_size_) throw std::logic_error("profile is not indexed by subset size");
  if (k < 0 || k > channels_) throw std::out_of_range("subset size outside the profile");
  if (k == 0) return 0.0;
  return by_size_(k);
}

NoClickProfile gaussian_no_click_profile(const SqueezedCoherentParams& state,
                                         const DetectorConfig& config) {
  state.validate();
  if (config.is_symmetric()) {
    const double t1 = config.channel_transmission(0);
    return NoClickProfile::by_size(config.channels(), [state, t1](int k) {
      return no_click_deficit(state, std::min(k * t1, 1.0));
    });
  }
  return NoClickProfile::by_subset(config.channels(), [state, config](ChannelMask s) {
    return no_click_deficit(state, effective_attenuation(config, s));
  });
}

// R_G = sum_{S subset of G} (-1)^{|S|} R_{0,S} = sum_{S nonempty} (-1)^{|S|+1} d_S,
// using sum_S (-1)^{|S|} = 0 for nonempty G.
double click_success(const NoClickProfile& profile, ChannelMask group) {
  if (group & ~first_channels(profile.channels())) {
    throw std::out_of_range("click group outside the profile");
  }
  if (group == 0) return 1.0;
  CompensatedSum acc;
  for (ChannelMask s = group; s != 0; s = (s - 1) & group) {
    acc += sign_for_size(std::popcount(s)) * profile.deficit(s);
  }
  return checked_probability(acc.value(), "click probability");
}

double click_success_by_subsets(const NoClickProfile& profile, int order) {
  if (order < 0 || order > profile.channels()) {
    throw std::out_of_range("criterion order exceeds the channel count");
  }
  return click_success(profile, first_channels(order));
}

double click_success(const NoClickProfile& profile, int order) {
  if (order < 0 || order > profile.channels()) {
    throw std::out_of_range("criterion order exceeds the channel count");
  }
  if (order == 0) return 1.0;
  if (!profile.size_indexed()) return click_success(profile, first_channels(order));
  CompensatedSum acc;
  for (int k = 1; k <= order; ++k) {
    acc += sign_for_size(k) * binomial(order, k) * profile.deficit_of_size(k);
  }
  return checked_probability(acc.value(), "click probability");
}

ClickProbabilities click_stats(const NoClickProfile& profile, int order) {
  if (order < 1) throw std::invalid_argument("criterion order must be at least 1");
  if (profile.channels() != order + 1) {
    throw std::invalid_argument("a criterion of order n needs an (n+1)-channel detector");
  }
  return {order, click_success(profile, order), click_success(profile, order + 1)};
}

ClickProbabilities photon_count_click_stats(std::span<const double> photon_distribution,
                                            const DetectorConfig& config, int order) {
  if (order < 1) throw std::invalid_argument("criterion order must be at least 1");
  const int channels = config.channels();
  if (channels != order + 1) {
    throw std::invalid_argument("a criterion of order n needs an (n+1)-channel detector");
  }
  CompensatedSum success;
  CompensatedSum error;
  if (config.is_symmetric()) {
    // cover[c]: exactly c distinct channels hit so far.
    const double t1 = config.channel_transmission(0);
    const double lost = std::max(0.0, 1.0 - channels * t1);
    std::vector<double> cover(channels + 1, 0.0);
    std::vector<double> next(channels + 1);
    cover[0] = 1.0;
    for (double p : photon_distribution) {
      if (p > 0.0) {
        success += p * cover[order] / channels;
        success += p * cover[channels];
        error += p * cover[channels];
      }
      for (int c = 0; c <= channels; ++c) {
        next[c] = cover[c] * (lost + c * t1);
        if (c > 0) next[c] += cover[c - 1] * (channels - c + 1) * t1;
      }
      cover.swap(next);
    }
  } else {
    // cover[s]: exactly the channels in s hit so far.
    std::vector<double> t(channels);
    double lost = 1.0;
    for (int i = 0; i < channels; ++i) {
      t[i] = config.channel_transmission(i);
      lost -= t[i];
    }
    lost = std::max(0.0, lost);
    const ChannelMask all = first_channels(channels);
    const ChannelMask group = first_channels(order);
    std::vector<double> cover(std::size_t{all} + 1, 0.0);
    std::vector<double> next(cover.size());
    cover[0] = 1.0;
    for (double p : photon_distribution) {
      if (p > 0.0) {
        for (ChannelMask s = group; s <= all; ++s) {
          if ((s & group) == group) success += p * cover[s];
        }
        error += p * cover[all];
      }
      for (ChannelMask s = 0; s <= all; ++s) {
        double hit = lost;
        double v = 0.0;
        for (int i = 0; i < channels; ++i) {
          const ChannelMask bit = ChannelMask{1} << i;
          if (s & bit) {
            hit += t[i];
            v += t[i] * cover[s & ~bit];
          }
        }
        next[s] = v + hit * cover[s];
      }
      cover.swap(next);
    }
  }
  return {order, std::clamp(success.value(), 0.0, 1.0), std::clamp(error.value(), 0.0, 1.0)};
}

InclusionExclusionPlan InclusionExclusionPlan::build(const DetectorConfig& config, int order) {
  if (order < 1) throw std::invalid_argument("criterion order must be at least 1");
  const int channels = config.channels();
  if (channels != order + 1) {
    throw std::invalid_argument("a criterion of order n needs an (n+1)-channel detector");
  }
  InclusionExclusionPlan plan;
  if (config.is_symmetric()) {
    const double t1 = config.channel_transmission(0);
    for (int k = 1; k <= channels; ++k) {
      plan.attenuations.push_back(std::min(k * t1, 1.0));
      plan.success_weights.push_back(k <= order ? sign_for_size(k) * binomial(order, k) : 0.0);
      plan.error_weights.push_back(sign_for_size(k) * binomial(channels, k));
    }
    return plan;
  }

  const ChannelMask group = first_channels(order);
  const ChannelMask all = first_channels(channels);
  std::map<double, std::pair<double, double>> merged;
  for (ChannelMask s = all; s != 0; s = (s - 1) & all) {
    const double sign = sign_for_size(std::popcount(s));
    auto& w = merged[effective_attenuation(config, s)];
    if ((s & ~group) == 0) w.first += sign;
    w.second += sign;
  }
  for (const auto& [t, w] : merged) {
    if (w.first == 0.0 && w.second == 0.0) continue;
    plan.attenuations.push_back(t);
    plan.success_weights.push_back(w.first);
    plan.error_weights.push_back(w.second);
  }
  return plan;
}

}  // namespace qng
