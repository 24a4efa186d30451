#include "lwshrink/cli.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace lwshrink::cli {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"experiment", {"mode", "n_mc", "seed", "estimators", "threads", "timing"}},
      {"distribution", {"kind", "nu", "nu_first", "nu_second"}},
      {"sigma", {"mode"}},
      {"grid", {"p", "n"}},
      {"convergence", {"c", "n"}},
      {"output", {"csv"}},
  };
  return keys;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <typename T>
T parse_number(const std::string& text, const std::string& key) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw InputError("config key '" + key + "': cannot parse '" + text + "' as a number");
  }
  return value;
}

std::vector<Index> parse_index_list(const std::string& text, const std::string& key) {
  std::vector<Index> values;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw InputError("config key '" + key + "': range must be start:stop:step");
    const auto start = parse_number<long long>(parts[0], key);
    const auto stop = parse_number<long long>(parts[1], key);
    const auto step = parse_number<long long>(parts[2], key);
    if (step <= 0 || stop < start) throw InputError("config key '" + key + "': empty or invalid range");
    for (long long v = start; v <= stop; v += step) values.push_back(v);
  } else {
    for (const auto& part : split(text, ',')) values.push_back(parse_number<long long>(part, key));
  }
  for (Index v : values) {
    if (v < 1) throw InputError("config key '" + key + "': values must be >= 1");
  }
  return values;
}

bool parse_bool(const std::string& text, const std::string& key) {
  if (text == "true" || text == "on" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "off" || text == "no" || text == "0") return false;
  throw InputError("config key '" + key + "': expected true/false, got '" + text + "'");
}

std::string join_indices(const std::vector<Index>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(values[i]);
  }
  return s;
}

class Lookup {
 public:
  explicit Lookup(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> get(const std::string& section, const std::string& key) const {
    auto node = tree_.get_child_optional(pt::ptree::path_type(section + "/" + key, '/'));
    if (!node) return std::nullopt;
    return trim(node->data());
  }

  std::string require(const std::string& section, const std::string& key) const {
    auto v = get(section, key);
    if (!v || v->empty()) throw InputError("missing required config key '" + section + "." + key + "'");
    return *v;
  }

 private:
  const pt::ptree& tree_;
};

}  // namespace

RunConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw InputError("config line " + std::to_string(e.line()) + ": " + e.message());
  }

  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) {
      throw InputError(body.empty() && !body.data().empty()
                           ? "unknown config key '" + section + "' outside any section"
                           : "unknown config section '[" + section + "]'");
    }
    if (body.empty() && !body.data().empty()) {
      throw InputError("config key '" + section + "' must appear inside a section");
    }
    for (const auto& entry : body) {
      if (!it->second.contains(entry.first)) {
        throw InputError("unknown config key '" + section + "." + entry.first + "'");
      }
    }
  }

  const Lookup lookup(tree);
  RunConfig result;
  ExperimentConfig& c = result.experiment;

  const std::string mode = lookup.require("experiment", "mode");
  if (mode == "grid") {
    c.mode = ExperimentMode::grid;
  } else if (mode == "convergence") {
    c.mode = ExperimentMode::convergence;
  } else {
    throw InputError("config key 'experiment.mode': expected grid or convergence, got '" + mode + "'");
  }
  if (auto v = lookup.get("experiment", "n_mc")) c.n_mc = parse_number<long long>(*v, "experiment.n_mc");
  if (auto v = lookup.get("experiment", "seed")) c.base_seed = parse_number<std::uint64_t>(*v, "experiment.seed");
  if (auto v = lookup.get("experiment", "threads")) c.threads = parse_number<unsigned>(*v, "experiment.threads");
  if (auto v = lookup.get("experiment", "timing")) c.record_timing = parse_bool(*v, "experiment.timing");
  if (auto v = lookup.get("experiment", "estimators")) {
    c.estimators.clear();
    for (const auto& name : split(*v, ',')) {
      try {
        c.estimators.push_back(parse_estimator(name));
      } catch (const std::invalid_argument& e) {
        throw InputError(std::string("config key 'experiment.estimators': ") + e.what());
      }
    }
  }

  const std::string kind = lookup.require("distribution", "kind");
  if (kind == "gaussian") {
    c.distribution = Gaussian{};
  } else if (kind == "student") {
    c.distribution = Student{parse_number<double>(lookup.require("distribution", "nu"), "distribution.nu")};
  } else if (kind == "mixed_student") {
    c.distribution = MixedStudent{
        parse_number<double>(lookup.require("distribution", "nu_first"), "distribution.nu_first"),
        parse_number<double>(lookup.require("distribution", "nu_second"), "distribution.nu_second")};
  } else {
    throw InputError("config key 'distribution.kind': expected gaussian, student or mixed_student, got '" +
                     kind + "'");
  }

  if (auto v = lookup.get("sigma", "mode")) {
    if (*v == "identity") {
      c.sigma_mode = SigmaMode::identity;
    } else if (*v == "wishart") {
      c.sigma_mode = SigmaMode::wishart;
    } else {
      throw InputError("config key 'sigma.mode': expected identity or wishart, got '" + *v + "'");
    }
  }

  if (auto v = lookup.get("grid", "p")) c.grid_p = parse_index_list(*v, "grid.p");
  if (auto v = lookup.get("grid", "n")) c.grid_n = parse_index_list(*v, "grid.n");
  if (auto v = lookup.get("convergence", "c")) c.ratio = parse_number<double>(*v, "convergence.c");
  if (auto v = lookup.get("convergence", "n")) c.n_values = parse_index_list(*v, "convergence.n");
  if (auto v = lookup.get("output", "csv")) result.csv_path = *v;

  try {
    validate(c);
  } catch (const std::exception& e) {
    throw InputError(std::string("invalid configuration: ") + e.what());
  }
  return result;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::string render_config(const RunConfig& config) {
  const ExperimentConfig& c = config.experiment;
  std::ostringstream os;
  os << "[experiment]\n";
  os << "mode = " << to_string(c.mode) << '\n';
  os << "n_mc = " << c.n_mc << '\n';
  os << "seed = " << c.base_seed << '\n';
  os << "estimators = ";
  for (std::size_t i = 0; i < c.estimators.size(); ++i) os << (i ? ", " : "") << to_string(c.estimators[i]);
  os << '\n';
  if (c.threads != 0) os << "threads = " << c.threads << '\n';
  os << "timing = " << (c.record_timing ? "true" : "false") << '\n';

  os << "\n[distribution]\n";
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          os << "kind = gaussian\n";
        } else if constexpr (std::is_same_v<T, Student>) {
          os << "kind = student\nnu = " << format_scalar(d.nu) << '\n';
        } else {
          os << "kind = mixed_student\nnu_first = " << format_scalar(d.nu_first)
             << "\nnu_second = " << format_scalar(d.nu_second) << '\n';
        }
      },
      c.distribution);

  os << "\n[sigma]\nmode = " << to_string(c.sigma_mode) << '\n';
  if (c.mode == ExperimentMode::grid) {
    os << "\n[grid]\np = " << join_indices(c.grid_p) << "\nn = " << join_indices(c.grid_n) << '\n';
  } else {
    os << "\n[convergence]\nc = " << format_scalar(c.ratio) << "\nn = " << join_indices(c.n_values) << '\n';
  }
  if (!config.csv_path.empty()) os << "\n[output]\ncsv = " << config.csv_path << '\n';
  return os.str();
}

}  // namespace lwshrink::cli
