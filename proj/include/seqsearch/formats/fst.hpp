#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "seqsearch/core/types.hpp"
#include "seqsearch/formats/text.hpp"

namespace seqsearch {

using StateId = std::int32_t;

/// Label 0 is epsilon on both tapes.
inline constexpr TokenId kEpsilon = 0;

struct FstArc {
  StateId dst = 0;
  TokenId ilabel = 0;
  TokenId olabel = 0;
  double cost = 0.0;  // tropical: lower is better

  bool operator==(const FstArc&) const = default;
};

/// Immutable weighted transducer with tropical costs.
class WeightedFst {
 public:
  WeightedFst() = default;
  WeightedFst(StateId start, std::vector<std::vector<FstArc>> arcs,
              std::vector<std::optional<double>> finals)
      : start_(start), arcs_(std::move(arcs)), finals_(std::move(finals)) {
    if (arcs_.size() != finals_.size()) throw ValidationError("arc and final tables differ in size");
    if (start_ < 0 || start_ >= num_states()) throw ValidationError("start state out of range");
    for (const auto& out : arcs_) {
      for (const auto& a : out) {
        if (a.dst < 0 || a.dst >= num_states()) throw ValidationError("arc target out of range");
      }
    }
  }

  StateId start() const { return start_; }
  StateId num_states() const { return static_cast<StateId>(arcs_.size()); }
  const std::vector<FstArc>& arcs(StateId s) const { return arcs_.at(s); }
  std::optional<double> final_cost(StateId s) const { return finals_.at(s); }
  bool is_final(StateId s) const { return finals_.at(s).has_value(); }

  std::size_t num_arcs() const {
    std::size_t n = 0;
    for (const auto& out : arcs_) n += out.size();
    return n;
  }

  bool operator==(const WeightedFst&) const = default;

 private:
  StateId start_ = 0;
  std::vector<std::vector<FstArc>> arcs_;
  std::vector<std::optional<double>> finals_;
};

/// Parses AT&T text format: "src dst ilabel olabel [cost]" arc lines and
/// "state [cost]" final lines. The first line's first field is the start
/// state. Every id in [0, max id] must be mentioned somewhere.
inline WeightedFst parse_att_fst(std::string_view content) {
  struct RawArc {
    StateId src;
    FstArc arc;
  };
  std::vector<RawArc> raw_arcs;
  std::vector<std::pair<StateId, double>> raw_finals;
  std::optional<StateId> start;
  StateId max_id = -1;
  std::size_t lineno = 0;

  auto state_id = [&](std::string_view f) {
    auto id = text::require_int<StateId>(f, lineno, "state id");
    if (id < 0) throw ParseError(lineno, "negative state id");
    max_id = std::max(max_id, id);
    return id;
  };
  auto label = [&](std::string_view f) {
    auto l = text::require_int<TokenId>(f, lineno, "label");
    if (l < 0) throw ParseError(lineno, "negative label");
    return l;
  };

  for (auto line : text::lines(content)) {
    ++lineno;
    const auto fields = text::split_ws(line);
    if (fields.empty()) continue;
    if (fields.size() == 1 || fields.size() == 2) {
      const StateId s = state_id(fields[0]);
      const double cost = fields.size() == 2 ? text::require_double(fields[1], lineno, "final cost") : 0.0;
      raw_finals.emplace_back(s, cost);
      if (!start) start = s;
    } else if (fields.size() == 4 || fields.size() == 5) {
      RawArc r;
      r.src = state_id(fields[0]);
      r.arc.dst = state_id(fields[1]);
      r.arc.ilabel = label(fields[2]);
      r.arc.olabel = label(fields[3]);
      r.arc.cost = fields.size() == 5 ? text::require_double(fields[4], lineno, "arc cost") : 0.0;
      raw_arcs.push_back(r);
      if (!start) start = r.src;
    } else {
      throw ParseError(lineno, "expected 'src dst ilabel olabel [cost]' or 'state [cost]', got " +
                                   std::to_string(fields.size()) + " fields");
    }
  }
  if (!start) throw ParseError(0, "FST text contains no states");

  const auto n = static_cast<std::size_t>(max_id) + 1;
  std::vector<bool> seen(n, false);
  std::vector<std::vector<FstArc>> arcs(n);
  std::vector<std::optional<double>> finals(n);
  for (const auto& r : raw_arcs) {
    seen[r.src] = seen[r.arc.dst] = true;
    arcs[r.src].push_back(r.arc);
  }
  for (const auto& [s, c] : raw_finals) {
    if (finals[s]) throw ValidationError("state " + std::to_string(s) + " is listed as final twice");
    seen[s] = true;
    finals[s] = c;
  }
  for (std::size_t s = 0; s < n; ++s) {
    if (!seen[s]) throw ValidationError("dangling state id " + std::to_string(s) + " (never mentioned)");
  }
  return WeightedFst(*start, std::move(arcs), std::move(finals));
}

inline WeightedFst load_att_fst(const std::string& path) { return parse_att_fst(text::read_file(path)); }

/// Canonical AT&T text: tab separated, 6-decimal costs, start state first,
/// each state's arcs followed by its final line.
inline std::string serialize_att_fst(const WeightedFst& fst) {
  std::string out;
  auto emit_state = [&](StateId s) {
    for (const auto& a : fst.arcs(s)) {
      out += std::to_string(s) + '\t' + std::to_string(a.dst) + '\t' + std::to_string(a.ilabel) + '\t' +
             std::to_string(a.olabel) + '\t' + text::format_weight(a.cost) + '\n';
    }
    if (auto f = fst.final_cost(s)) out += std::to_string(s) + '\t' + text::format_weight(*f) + '\n';
  };
  emit_state(fst.start());
  for (StateId s = 0; s < fst.num_states(); ++s) {
    if (s != fst.start()) emit_state(s);
  }
  return out;
}

/// For every state, the states reachable through input-epsilon arcs with
/// their best (lowest) accumulated cost; the state itself is included at
/// cost 0. Rejects epsilon cycles whose total cost is <= 0.
inline std::vector<std::vector<std::pair<StateId, double>>> epsilon_closure(const WeightedFst& fst) {
  const StateId n = fst.num_states();
  std::vector<std::vector<std::pair<StateId, double>>> closure(n);
  bool any_eps = false;
  for (StateId s = 0; s < n && !any_eps; ++s) {
    for (const auto& a : fst.arcs(s)) any_eps |= a.ilabel == kEpsilon;
  }
  if (!any_eps) {
    for (StateId s = 0; s < n; ++s) closure[s] = {{s, 0.0}};
    return closure;
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  for (StateId s = 0; s < n; ++s) {
    // Bellman-Ford restricted to epsilon arcs; dist[s] stays 0 so that a
    // path returning to s is detected separately below.
    std::vector<double> dist(n, kInf);
    dist[s] = 0.0;
    bool changed = true;
    for (StateId iter = 0; changed; ++iter) {
      if (iter > n) throw ValidationError("negative-cost epsilon cycle");
      changed = false;
      for (StateId u = 0; u < n; ++u) {
        if (dist[u] == kInf) continue;
        for (const auto& a : fst.arcs(u)) {
          if (a.ilabel != kEpsilon || a.dst == s) continue;
          if (dist[u] + a.cost < dist[a.dst]) {
            dist[a.dst] = dist[u] + a.cost;
            changed = true;
          }
        }
      }
    }
    for (StateId u = 0; u < n; ++u) {
      if (dist[u] == kInf) continue;
      for (const auto& a : fst.arcs(u)) {
        if (a.ilabel == kEpsilon && a.dst == s && dist[u] + a.cost <= 0.0) {
          throw ValidationError("epsilon cycle with non-positive cost through state " + std::to_string(s));
        }
      }
    }
    for (StateId u = 0; u < n; ++u) {
      if (dist[u] != kInf) closure[s].emplace_back(u, dist[u]);
    }
  }
  return closure;
}

}  // namespace seqsearch
