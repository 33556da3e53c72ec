#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "icb/domain.hpp"
#include "icb/estimator.hpp"

namespace icb::ml {

/// d = 7 feature layout: intercept, age, gender (1 = F), four dummies for
/// the most frequent occupations in the retained population.
constexpr int kFeatureDim = 7;

struct UserFeatures {
  int user_id = 0;
  int gender = 0;  // 1 = F
  int age = 0;
  int occupation = 0;
  Vector feature;  // 7-vector, filled once the top occupations are known
};

struct RatingEvent {
  int user_id = 0;
  long timestamp = 0;
  std::string genre;
  int rating = 0;
  int arm = 0;  // 1 = Comedy, 0 = Drama
};

struct Dataset {
  std::vector<RatingEvent> events;  // genre-filtered, arbitrary order
  std::unordered_map<int, UserFeatures> users;
  std::array<int, 4> top_occupations{};
  long skipped_lines = 0;
};

namespace detail {

inline std::vector<std::string> split(const std::string& line,
                                      const std::string& sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = line.find(sep, pos);
    if (next == std::string::npos) {
      out.push_back(line.substr(pos));
      break;
    }
    out.push_back(line.substr(pos, next - pos));
    pos = next + sep.size();
  }
  return out;
}

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// Splits on "::" when present, otherwise on commas.
inline std::vector<std::string> split_record(const std::string& line) {
  if (line.find("::") != std::string::npos) return split(line, "::");
  return split(line, ",");
}

inline bool is_header(const std::vector<std::string>& fields) {
  return !fields.empty() && fields[0] == "user_id";
}

}  // namespace detail

/// Loads the ratings and users files. Both accept the "::"-separated layout
/// or a CSV with headers; field orders are
///   ratings: user_id,timestamp,genre,rating
///   users:   user_id,gender,age,occupation,zip
/// Only Comedy and Drama events are retained (arm 1 / arm 0). Malformed
/// lines are skipped and counted unless strict, in which case they throw.
inline Dataset load_dataset(const std::string& ratings_path,
                            const std::string& users_path,
                            bool strict = false) {
  Dataset ds;
  auto fail = [&](const std::string& msg) {
    if (strict) throw std::runtime_error(msg);
    ++ds.skipped_lines;
  };

  std::ifstream users(users_path);
  if (!users) throw std::runtime_error("cannot open users file: " + users_path);
  std::string line;
  bool first = true;
  while (std::getline(users, line)) {
    line = detail::trim(line);
    if (line.empty()) continue;
    auto f = detail::split_record(line);
    if (first && detail::is_header(f)) {
      first = false;
      continue;
    }
    first = false;
    if (f.size() < 4) {
      fail("users: short line: " + line);
      continue;
    }
    try {
      UserFeatures u;
      u.user_id = std::stoi(f[0]);
      const std::string g = detail::trim(f[1]);
      u.gender = (g == "F" || g == "f" || g == "1") ? 1 : 0;
      u.age = std::stoi(f[2]);
      u.occupation = std::stoi(f[3]);
      ds.users[u.user_id] = std::move(u);
    } catch (const std::exception&) {
      fail("users: malformed line: " + line);
    }
  }

  std::ifstream ratings(ratings_path);
  if (!ratings) {
    throw std::runtime_error("cannot open ratings file: " + ratings_path);
  }
  first = true;
  while (std::getline(ratings, line)) {
    line = detail::trim(line);
    if (line.empty()) continue;
    auto f = detail::split_record(line);
    if (first && detail::is_header(f)) {
      first = false;
      continue;
    }
    first = false;
    if (f.size() < 4) {
      fail("ratings: short line: " + line);
      continue;
    }
    try {
      RatingEvent e;
      e.user_id = std::stoi(f[0]);
      e.timestamp = std::stol(f[1]);
      e.genre = detail::trim(f[2]);
      e.rating = std::stoi(f[3]);
      if (e.rating < 1 || e.rating > 5) {
        fail("ratings: rating out of 1..5: " + line);
        continue;
      }
      if (e.genre == "Comedy") {
        e.arm = 1;
      } else if (e.genre == "Drama") {
        e.arm = 0;
      } else {
        continue;  // other genres are out of scope, not an error
      }
      if (!ds.users.count(e.user_id)) {
        fail("ratings: unknown user: " + line);
        continue;
      }
      ds.events.push_back(std::move(e));
    } catch (const std::exception&) {
      fail("ratings: malformed line: " + line);
    }
  }

  // Top-4 occupations by user frequency over the retained population
  // (users with at least one retained event); ties break toward the lower
  // occupation id for determinism.
  std::map<int, int> occ_counts;
  {
    std::unordered_map<int, bool> seen;
    for (const auto& e : ds.events) {
      if (!seen[e.user_id]) {
        seen[e.user_id] = true;
        ++occ_counts[ds.users[e.user_id].occupation];
      }
    }
  }
  std::vector<std::pair<int, int>> ranked(occ_counts.begin(),
                                          occ_counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  for (std::size_t k = 0; k < 4; ++k) {
    ds.top_occupations[k] =
        k < ranked.size() ? ranked[k].first : -1 - static_cast<int>(k);
  }

  for (auto& [id, u] : ds.users) {
    u.feature = Vector::Zero(kFeatureDim);
    u.feature[0] = 1.0;
    u.feature[1] = static_cast<double>(u.age);
    u.feature[2] = static_cast<double>(u.gender);
    for (int k = 0; k < 4; ++k) {
      if (u.occupation == ds.top_occupations[k]) u.feature[3 + k] = 1.0;
    }
  }
  return ds;
}

/// A round after partitioning: indices into Dataset::events.
using RoundGroup = std::vector<std::size_t>;

/// Sorts events by timestamp and cuts them into t_rounds contiguous groups
/// with quantile boundaries, so group sizes differ by at most one. A user
/// rating k times inside one group appears as k units.
inline std::vector<RoundGroup> partition_rounds(
    const std::vector<RatingEvent>& events, int t_rounds) {
  if (t_rounds < 1) throw std::invalid_argument("partition_rounds: T < 1");
  const std::size_t n = events.size();
  if (n < static_cast<std::size_t>(t_rounds)) {
    throw std::invalid_argument("partition_rounds: fewer events than rounds");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < n; ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (events[a].timestamp != events[b].timestamp) {
                       return events[a].timestamp < events[b].timestamp;
                     }
                     return events[a].user_id < events[b].user_id;
                   });
  std::vector<RoundGroup> groups(t_rounds);
  for (int g = 0; g < t_rounds; ++g) {
    const std::size_t lo = n * static_cast<std::size_t>(g) / t_rounds;
    const std::size_t hi = n * (static_cast<std::size_t>(g) + 1) / t_rounds;
    groups[g].assign(order.begin() + lo, order.begin() + hi);
  }
  return groups;
}

/// Categorical attribute profile entering the Jaccard sets: gender,
/// occupation bucket, age decade.
struct AttributeSet {
  int gender;
  int occupation;
  int age_decade;

  bool operator==(const AttributeSet& o) const {
    return gender == o.gender && occupation == o.occupation &&
           age_decade == o.age_decade;
  }
};

inline AttributeSet attributes_of(const UserFeatures& u) {
  return {u.gender, u.occupation, u.age / 10};
}

/// |A intersect B| / |A union B| for two deduplicated element lists.
inline double jaccard_index(std::vector<std::string> a,
                            std::vector<std::string> b) {
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  std::vector<std::string> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(common));
  const std::size_t uni = a.size() + b.size() - common.size();
  return uni == 0 ? 0.0
                  : static_cast<double>(common.size()) /
                        static_cast<double>(uni);
}

/// Raw Jaccard similarity of two 3-element attribute sets; elements are
/// attribute-tagged so matches only count within the same attribute.
/// Identical profiles give exactly 1.
inline double jaccard_similarity(const AttributeSet& a,
                                 const AttributeSet& b) {
  int common = 0;
  if (a.gender == b.gender) ++common;
  if (a.occupation == b.occupation) ++common;
  if (a.age_decade == b.age_decade) ++common;
  return static_cast<double>(common) / static_cast<double>(6 - common);
}

/// Interference matrix for one round: unit diagonal, raw Jaccard
/// similarities off the diagonal (identical profiles give exactly 1), then
/// one global scale on all off-diagonals so every row's absolute sum stays
/// at or below l_w_target. The single scale keeps the matrix symmetric.
inline Matrix jaccard_interference(const std::vector<AttributeSet>& units,
                                   double l_w_target = 5.0) {
  const int n = static_cast<int>(units.size());
  if (n < 1) throw std::invalid_argument("jaccard_interference: empty round");
  if (l_w_target <= 1.0) {
    throw std::invalid_argument("jaccard_interference: l_w_target <= 1");
  }
  Matrix w = Matrix::Identity(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double s = jaccard_similarity(units[i], units[j]);
      w(i, j) = s;
      w(j, i) = s;
    }
  }
  double max_off = 0.0;
  for (int i = 0; i < n; ++i) {
    max_off = std::max(max_off, w.row(i).cwiseAbs().sum() - 1.0);
  }
  if (max_off > l_w_target - 1.0) {
    const double scale = (l_w_target - 1.0) / max_off;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j) w(i, j) *= scale;
      }
    }
  }
  return w;
}

/// Whole-dataset average rating per user and arm, with the global arm mean
/// as the fallback for users who never rated a genre.
class PerUserMeans {
 public:
  explicit PerUserMeans(const std::vector<RatingEvent>& events) {
    std::array<double, 2> global_sum{0.0, 0.0};
    std::array<long, 2> global_count{0, 0};
    for (const auto& e : events) {
      auto& cell = table_[e.user_id][e.arm];
      cell.first += e.rating;
      cell.second += 1;
      global_sum[e.arm] += e.rating;
      global_count[e.arm] += 1;
    }
    for (int a = 0; a < 2; ++a) {
      global_mean_[a] =
          global_count[a] > 0 ? global_sum[a] / global_count[a] : 0.0;
    }
  }

  /// R_bar_j(a); falls back to the global arm mean and counts the event.
  double mean(int user_id, int arm) const {
    auto it = table_.find(user_id);
    if (it != table_.end() && it->second[arm].second > 0) {
      return it->second[arm].first / it->second[arm].second;
    }
    ++fallbacks_;
    return global_mean_[arm];
  }

  double global_mean(int arm) const { return global_mean_[arm]; }
  long fallbacks() const { return fallbacks_; }

 private:
  std::unordered_map<int, std::array<std::pair<double, long>, 2>> table_;
  std::array<double, 2> global_mean_{0.0, 0.0};
  mutable long fallbacks_ = 0;
};

/// Reward model I: R_i = sum_j w_ij * R_bar_j(a_j), deterministic given the
/// assignment.
inline Vector reward_model_one(const Round& round,
                               const std::vector<int>& unit_user_ids,
                               const PerUserMeans& means) {
  if (!round.actions) {
    throw std::logic_error("reward_model_one: round has no actions");
  }
  const int n = round.n_units;
  if (static_cast<int>(unit_user_ids.size()) != n) {
    throw std::invalid_argument("reward_model_one: user id count mismatch");
  }
  Vector base(n);
  for (int i = 0; i < n; ++i) {
    base[i] = means.mean(unit_user_ids[i], (*round.actions)[i]);
  }
  return round.interference * base;
}

struct FittedRewardModel {
  BetaVector beta;
  double sigma = 0.0;
};

/// Reward model II: batch OLS of the observed ratings on the transformed
/// rows built from the historical genre assignments. Throws on rank
/// deficiency, naming the collinear columns.
inline FittedRewardModel fit_reward_model_two(
    const std::vector<Round>& rounds_with_actions_rewards) {
  int d = -1;
  long n = 0;
  for (const auto& r : rounds_with_actions_rewards) {
    if (!r.actions || !r.rewards) {
      throw std::logic_error("fit_reward_model_two: incomplete round");
    }
    if (d < 0) d = r.d();
    n += r.n_units;
  }
  if (d < 0 || n < 2 * d) {
    throw std::invalid_argument("fit_reward_model_two: too few observations");
  }
  EstimatorState st(d);
  for (const auto& r : rounds_with_actions_rewards) {
    st.absorb_round(transform_covariates(r).xt, *r.rewards, r.contexts);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(st.gram());
  const Vector& ev = es.eigenvalues();
  const double floor = 1e-10 * std::max(1.0, ev.maxCoeff());
  std::vector<int> collinear;
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (ev[k] < floor) {
      // Name the columns loading on the null direction.
      const Vector dir = es.eigenvectors().col(k).cwiseAbs();
      for (Eigen::Index c = 0; c < dir.size(); ++c) {
        if (dir[c] > 0.3) collinear.push_back(static_cast<int>(c));
      }
    }
  }
  if (!collinear.empty()) {
    std::ostringstream os;
    os << "fit_reward_model_two: rank-deficient design; collinear transformed"
          " columns:";
    for (int c : collinear) os << ' ' << c;
    throw std::runtime_error(os.str());
  }
  FittedRewardModel fit;
  fit.beta = st.solve_beta();
  fit.sigma = st.n_bar() > 2 * d ? st.sigma_hat() : 0.0;
  return fit;
}

}  // namespace icb::ml
