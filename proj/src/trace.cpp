#include "pkgc/trace.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <string_view>

namespace pkgc {

std::string_view to_string(TraceErrorKind k) {
  switch (k) {
    case TraceErrorKind::MalformedRow: return "MalformedRow";
    case TraceErrorKind::NonMonotonicTimestamp: return "NonMonotonicTimestamp";
    case TraceErrorKind::UnknownState: return "UnknownState";
    case TraceErrorKind::MissingInitialState: return "MissingInitialState";
  }
  return "?";
}

TraceParseError::TraceParseError(TraceErrorKind kind, std::size_t line, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + " at line " + std::to_string(line) + ": " +
                         detail),
      kind_(kind),
      line_(line) {}

namespace {

constexpr std::string_view kHeader = "timestamp_ns,core_id,cstate";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos
                                                                    : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

template <typename T>
std::optional<T> parse_uint(std::string_view s) {
  T v{};
  if (s.empty()) return std::nullopt;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

struct Directives {
  std::optional<std::size_t> n_cores;
  std::optional<std::pair<TimeNs, TimeNs>> window;
  std::optional<std::vector<CoreCState>> initial;
  std::size_t initial_line = 0;
};

void parse_directive(std::string_view body, std::size_t line, Directives& d) {
  const auto eq = body.find('=');
  if (eq == std::string_view::npos) return;  // plain comment
  const auto key = trim(body.substr(0, eq));
  const auto value = trim(body.substr(eq + 1));
  if (key == "n_cores") {
    const auto n = parse_uint<std::size_t>(value);
    if (!n) throw TraceParseError(TraceErrorKind::MalformedRow, line, "bad n_cores");
    d.n_cores = *n;
  } else if (key == "window_ns") {
    const auto parts = split(value, ',');
    std::optional<TimeNs> a, b;
    if (parts.size() == 2) {
      a = parse_uint<TimeNs>(parts[0]);
      b = parse_uint<TimeNs>(parts[1]);
    }
    if (!a || !b || *a > *b) throw TraceParseError(TraceErrorKind::MalformedRow, line, "bad window_ns");
    d.window = std::make_pair(*a, *b);
  } else if (key == "initial") {
    std::vector<CoreCState> states;
    for (auto tok : split(value, ',')) {
      const auto s = parse_core_cstate(tok);
      if (!s) throw TraceParseError(TraceErrorKind::UnknownState, line, std::string(tok));
      states.push_back(*s);
    }
    d.initial = std::move(states);
    d.initial_line = line;
  }
}

}  // namespace

CStateTrace parse_trace(std::istream& in) {
  Directives dir;
  bool seen_header = false;
  std::size_t header_line = 0;

  struct Row {
    TraceEvent ev;
    std::size_t line;
  };
  std::vector<Row> rows;
  struct CoreCursor {
    TimeNs last_ts = 0;
    CoreCState last_state = CoreCState::CC0;
    bool any = false;
  };
  std::vector<CoreCursor> cursors;

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line_no == 1 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);  // BOM
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (!seen_header) parse_directive(line.substr(1), line_no, dir);
      continue;
    }
    if (!seen_header) {
      if (line != kHeader) {
        throw TraceParseError(TraceErrorKind::MalformedRow, line_no,
                              "expected header '" + std::string(kHeader) + "'");
      }
      seen_header = true;
      header_line = line_no;
      continue;
    }

    const auto fields = split(line, ',');
    if (fields.size() != 3) {
      throw TraceParseError(TraceErrorKind::MalformedRow, line_no, "expected 3 fields");
    }
    const auto ts = parse_uint<TimeNs>(fields[0]);
    const auto core = parse_uint<std::size_t>(fields[1]);
    if (!ts || !core) {
      throw TraceParseError(TraceErrorKind::MalformedRow, line_no, "non-numeric timestamp or core");
    }
    const auto state = parse_core_cstate(fields[2]);
    if (!state) {
      throw TraceParseError(TraceErrorKind::UnknownState, line_no, std::string(fields[2]));
    }
    if (dir.n_cores && *core >= *dir.n_cores) {
      throw TraceParseError(TraceErrorKind::MalformedRow, line_no, "core_id >= n_cores");
    }
    if (*core >= cursors.size()) cursors.resize(*core + 1);
    auto& cur = cursors[*core];
    if (cur.any) {
      if (*ts <= cur.last_ts) {
        throw TraceParseError(TraceErrorKind::NonMonotonicTimestamp, line_no,
                              "core " + std::to_string(*core));
      }
      if (*state == cur.last_state) {
        throw TraceParseError(TraceErrorKind::MalformedRow, line_no, "state did not change");
      }
    }
    cur = CoreCursor{*ts, *state, true};
    rows.push_back(Row{TraceEvent{*ts, *core, *state}, line_no});
  }
  if (!seen_header) throw TraceParseError(TraceErrorKind::MalformedRow, line_no, "missing header");

  CStateTrace trace;
  trace.n_cores = dir.n_cores.value_or(cursors.size());

  if (dir.window) {
    trace.t_start = dir.window->first;
    trace.t_end = dir.window->second;
  } else if (!rows.empty()) {
    trace.t_start = std::min_element(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
                      return a.ev.timestamp_ns < b.ev.timestamp_ns;
                    })->ev.timestamp_ns;
    trace.t_end = std::max_element(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
                    return a.ev.timestamp_ns < b.ev.timestamp_ns;
                  })->ev.timestamp_ns;
  }

  for (const auto& r : rows) {
    if (r.ev.timestamp_ns > trace.t_end) {
      throw TraceParseError(TraceErrorKind::MalformedRow, r.line, "timestamp after window end");
    }
  }

  if (dir.initial) {
    if (dir.initial->size() != trace.n_cores) {
      throw TraceParseError(TraceErrorKind::MalformedRow, dir.initial_line,
                            "initial state count differs from n_cores");
    }
    trace.initial_states.assign(dir.initial->begin(), dir.initial->end());
  }

  // Each core needs a state at t_start.
  std::vector<bool> defined(trace.n_cores, dir.initial.has_value());
  std::vector<std::size_t> first_line(trace.n_cores, 0);
  for (const auto& r : rows) {
    if (r.ev.timestamp_ns <= trace.t_start) defined[r.ev.core_id] = true;
    if (first_line[r.ev.core_id] == 0) first_line[r.ev.core_id] = r.line;
  }
  for (std::size_t c = 0; c < trace.n_cores; ++c) {
    if (!defined[c]) {
      throw TraceParseError(TraceErrorKind::MissingInitialState,
                            first_line[c] ? first_line[c] : header_line,
                            "core " + std::to_string(c) + " has no state at window start");
    }
  }

  trace.events.reserve(rows.size());
  for (const auto& r : rows) trace.events.push_back(r.ev);
  std::stable_sort(trace.events.begin(), trace.events.end(),
                   [](const TraceEvent& a, const TraceEvent& b) {
                     if (a.timestamp_ns != b.timestamp_ns) return a.timestamp_ns < b.timestamp_ns;
                     return a.core_id < b.core_id;
                   });
  return trace;
}

CStateTrace parse_trace_string(const std::string& text) {
  std::istringstream in(text);
  return parse_trace(in);
}

void write_trace_csv(std::ostream& out, const CStateTrace& trace) {
  out << "# n_cores=" << trace.n_cores << '\n';
  out << "# window_ns=" << trace.t_start << ',' << trace.t_end << '\n';
  if (!trace.initial_states.empty()) {
    out << "# initial=";
    for (std::size_t c = 0; c < trace.initial_states.size(); ++c) {
      if (c) out << ',';
      out << to_string(trace.initial_states[c].value_or(CoreCState::CC0));
    }
    out << '\n';
  }
  out << kHeader << '\n';
  for (const auto& e : trace.events) {
    out << e.timestamp_ns << ',' << e.core_id << ',' << to_string(e.state) << '\n';
  }
}

// ---- interval analysis --------------------------------------------------------

namespace {

/// State of every core at t_start plus the index of the first event after it.
std::pair<std::vector<CoreCState>, std::size_t> states_at_start(const CStateTrace& trace) {
  std::vector<CoreCState> states(trace.n_cores, CoreCState::CC0);
  for (std::size_t c = 0; c < trace.initial_states.size() && c < trace.n_cores; ++c) {
    if (trace.initial_states[c]) states[c] = *trace.initial_states[c];
  }
  std::size_t i = 0;
  for (; i < trace.events.size() && trace.events[i].timestamp_ns <= trace.t_start; ++i) {
    states[trace.events[i].core_id] = trace.events[i].state;
  }
  return {std::move(states), i};
}

IdleIntervalReport finish_report(std::vector<Interval> intervals, TimeNs window,
                                 const std::vector<TimeNs>& edges) {
  IdleIntervalReport r;
  r.intervals = std::move(intervals);
  r.window_ns = window;
  for (const auto& iv : r.intervals) r.total_idle_ns += iv.duration();
  r.pc1a_residency_fraction =
      window == 0 ? 0.0 : static_cast<double>(r.total_idle_ns) / static_cast<double>(window);
  r.histogram = idle_histogram(r.intervals, edges);
  r.n_transitions = r.intervals.size();
  return r;
}

}  // namespace

IdleIntervalReport all_idle_intervals(const CStateTrace& trace, CoreCState gate) {
  std::vector<Interval> intervals;
  const TimeNs window = trace.window_ns();
  if (trace.n_cores > 0 && window > 0) {
    auto [states, i] = states_at_start(trace);
    std::size_t deep = 0;
    for (auto s : states) deep += deeper_or_equal(s, gate) ? 1 : 0;

    bool open = deep == trace.n_cores;
    TimeNs open_at = trace.t_start;
    const auto& ev = trace.events;
    while (i < ev.size() && ev[i].timestamp_ns < trace.t_end) {
      const TimeNs t = ev[i].timestamp_ns;
      for (; i < ev.size() && ev[i].timestamp_ns == t; ++i) {
        auto& s = states[ev[i].core_id];
        deep -= deeper_or_equal(s, gate) ? 1 : 0;
        s = ev[i].state;
        deep += deeper_or_equal(s, gate) ? 1 : 0;
      }
      const bool all = deep == trace.n_cores;
      if (all && !open) {
        open = true;
        open_at = t;
      } else if (!all && open) {
        open = false;
        intervals.push_back({open_at, t});
      }
    }
    if (open) intervals.push_back({open_at, trace.t_end});
  }
  return finish_report(std::move(intervals), window, default_histogram_edges());
}

IdleIntervalReport apply_sampling_floor(const IdleIntervalReport& report, TimeNs floor_ns) {
  std::vector<Interval> kept;
  std::copy_if(report.intervals.begin(), report.intervals.end(), std::back_inserter(kept),
               [floor_ns](const Interval& iv) { return iv.duration() >= floor_ns; });
  const auto edges =
      report.histogram.upper_edges.empty() ? default_histogram_edges() : report.histogram.upper_edges;
  return finish_report(std::move(kept), report.window_ns, edges);
}

std::vector<TimeNs> default_histogram_edges() {
  return {1'000, 10'000, 20'000, 100'000, 200'000, 1'000'000, Histogram::kInfinity};
}

std::size_t Histogram::total() const {
  std::size_t n = 0;
  for (auto c : counts) n += c;
  return n;
}

std::size_t Histogram::count_in_range(TimeNs lo, TimeNs hi) const {
  std::size_t n = 0;
  for (std::size_t b = 0; b < counts.size(); ++b) {
    if (lower(b) >= lo && upper_edges[b] <= hi) n += counts[b];
  }
  return n;
}

Histogram idle_histogram(const std::vector<Interval>& intervals, const std::vector<TimeNs>& edges) {
  Histogram h;
  h.upper_edges = edges;
  if (h.upper_edges.empty() || h.upper_edges.back() != Histogram::kInfinity) {
    h.upper_edges.push_back(Histogram::kInfinity);
  }
  h.counts.assign(h.upper_edges.size(), 0);
  for (const auto& iv : intervals) {
    const auto it = std::upper_bound(h.upper_edges.begin(), h.upper_edges.end(), iv.duration());
    const auto bin = it == h.upper_edges.end() ? h.upper_edges.size() - 1
                                               : static_cast<std::size_t>(it - h.upper_edges.begin());
    ++h.counts[bin];
  }
  return h;
}

ResidencyReport residency_by_state(const CStateTrace& trace) {
  ResidencyReport rep;
  rep.per_core.assign(trace.n_cores, StateFractions{});
  const TimeNs window = trace.window_ns();
  if (trace.n_cores == 0 || window == 0) return rep;

  auto [states, i] = states_at_start(trace);
  std::vector<std::array<TimeNs, kNumCoreStates>> tally(trace.n_cores, {0, 0, 0, 0});
  std::vector<TimeNs> since(trace.n_cores, trace.t_start);
  for (; i < trace.events.size() && trace.events[i].timestamp_ns < trace.t_end; ++i) {
    const auto& e = trace.events[i];
    tally[e.core_id][static_cast<std::size_t>(states[e.core_id])] += e.timestamp_ns - since[e.core_id];
    since[e.core_id] = e.timestamp_ns;
    states[e.core_id] = e.state;
  }
  for (std::size_t c = 0; c < trace.n_cores; ++c) {
    tally[c][static_cast<std::size_t>(states[c])] += trace.t_end - since[c];
    for (std::size_t s = 0; s < kNumCoreStates; ++s) {
      rep.per_core[c][s] = static_cast<double>(tally[c][s]) / static_cast<double>(window);
      rep.aggregate[s] += rep.per_core[c][s] / static_cast<double>(trace.n_cores);
    }
  }
  return rep;
}

double WakeWidthDistribution::mean() const {
  double sum = 0.0, weighted = 0.0;
  for (std::size_t k = 0; k < weight.size(); ++k) {
    sum += weight[k];
    weighted += static_cast<double>(k + 1) * weight[k];
  }
  return sum > 0.0 ? weighted / sum : 1.0;
}

LatencyImpact latency_impact(std::size_t n_transitions, TimeNs transition_cost_ns,
                             std::size_t n_requests, TimeNs baseline_latency_ns,
                             const std::optional<WakeWidthDistribution>& wake_width) {
  if (n_requests == 0) throw DegenerateWorkload("no requests");
  if (baseline_latency_ns == 0) throw DegenerateWorkload("zero baseline latency");
  const double width = wake_width ? wake_width->mean() : 1.0;
  LatencyImpact out;
  out.added_avg_ns = static_cast<double>(n_transitions) * static_cast<double>(transition_cost_ns) *
                     width / static_cast<double>(n_requests);
  out.relative_fraction = out.added_avg_ns / static_cast<double>(baseline_latency_ns);
  return out;
}

void write_intervals_csv(std::ostream& out, const std::vector<Interval>& intervals) {
  out << "start_ns,end_ns,duration_ns\n";
  for (const auto& iv : intervals) {
    out << iv.start_ns << ',' << iv.end_ns << ',' << iv.duration() << '\n';
  }
}

// ---- batch --------------------------------------------------------------------

std::vector<IdleIntervalReport> analyze_traces(const std::vector<CStateTrace>& traces,
                                               CoreCState gate) {
  std::vector<IdleIntervalReport> out(traces.size());
  const auto n = static_cast<std::ptrdiff_t>(traces.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = all_idle_intervals(traces[static_cast<std::size_t>(i)], gate);
  }
  return out;
}

std::vector<IdleIntervalReport> analyze_traces_serial(const std::vector<CStateTrace>& traces,
                                                      CoreCState gate) {
  std::vector<IdleIntervalReport> out;
  out.reserve(traces.size());
  for (const auto& t : traces) out.push_back(all_idle_intervals(t, gate));
  return out;
}

}  // namespace pkgc
