// roundwalk: command-line front end for the lattice and surface retractions.
//
// Exit codes: 0 success, 1 I/O error, 2 domain error, 64 usage error.
// Output is deterministic for a fixed config; --out writes atomically
// (temp file + rename).  The ROUNDWALK_SEED environment variable is
// recorded in the config echo but never used (all algorithms are
// deterministic).

#include <CLI11.hpp>

#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "roundwalk/lattice_retract.hpp"
#include "roundwalk/serialize.hpp"
#include "roundwalk/surface.hpp"

namespace {

using nlohmann::json;
using namespace roundwalk;

// "@path" loads the file; anything else is inline text.
std::string load_arg(const std::string& arg) {
  if (arg.empty() || arg[0] != '@') return arg;
  std::ifstream f(arg.substr(1), std::ios::binary);
  if (!f) throw std::ios_base::failure("cannot read " + arg.substr(1));
  return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

void write_atomic(const std::string& path, const std::string& data) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::ios_base::failure("cannot open " + tmp);
    f << data;
    f.flush();
    if (!f) throw std::ios_base::failure("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::ios_base::failure("rename failed: " + path);
}

// Accepts "1.2i", "0.1+1.2i", "-0.3-2e-1i", or a pure real.
std::complex<double> parse_complex(std::string s) {
  std::string t;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  if (t.empty()) throw std::invalid_argument("empty complex literal");
  auto to_double = [](const std::string& u) {
    std::size_t pos = 0;
    const double v = std::stod(u, &pos);
    if (pos != u.size()) throw std::invalid_argument("bad numeric literal: " + u);
    return v;
  };
  if (t.back() != 'i') return {to_double(t), 0.0};
  t.pop_back();
  // split at the sign that separates real and imaginary parts
  std::size_t split = std::string::npos;
  for (std::size_t i = t.size(); i-- > 1;) {
    if ((t[i] == '+' || t[i] == '-') && t[i - 1] != 'e' && t[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string::npos) {
    const std::string im = t.empty() || t == "+" ? "1" : (t == "-" ? "-1" : t);
    return {0.0, to_double(im)};
  }
  std::string im = t.substr(split);
  if (im == "+") im = "1";
  if (im == "-") im = "-1";
  return {to_double(t.substr(0, split)), to_double(im)};
}

FNPoint parse_fn(const json& j) {
  if (j.is_object()) return fn_from_json(j);
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("fn must be [[l1,l2,l3],[t1,t2,t3]]");
  return fn_from_json(json{{"lengths", j.at(0)}, {"twists", j.at(1)}});
}

StopRule parse_stop(const std::string& s) {
  if (s == "thick") return StopRule::kThick;
  if (s == "spine") return StopRule::kSpine;
  if (s == "s2") return StopRule::kS2;
  throw std::invalid_argument("unknown stop rule: " + s);
}

json classes_to_json(const std::vector<GeodesicClass>& classes) {
  json out = json::array();
  for (const auto& c : classes)
    out.push_back(
        {{"word", word_to_string(c.word)}, {"length", c.length}, {"trace", c.matrix.trace()}});
  return out;
}

// Normalized config with defaults filled in; echoed verbatim in the output.
json echo_config(const json& cfg) {
  json echo = cfg;
  const char* seed = std::getenv("ROUNDWALK_SEED");
  echo["seed"] = seed ? json(std::string(seed)) : json(nullptr);
  return echo;
}

// Executes one config and returns the rendered output (before --out routing).
std::string run_config(const json& cfg) {
  const std::string command = cfg.at("command").get<std::string>();
  const std::string format = cfg.value("format", std::string("json"));
  if (format != "json" && format != "csv")
    throw std::invalid_argument("unknown format: " + format);
  const json echo = echo_config(cfg);

  if (command == "lattice-retract") {
    if (format == "csv") throw std::invalid_argument("csv not supported for lattice-retract");
    const json basis = json::parse(load_arg(cfg.at("basis").get<std::string>()));
    if (!basis.is_array() || basis.empty()) throw std::invalid_argument("basis must be a matrix");
    const Lattice lat =
        lattice_from_json(json{{"n", static_cast<int>(basis.size())}, {"basis", basis}});
    const LatticeTrajectory traj = retract(lat);
    return json{{"config", echo}, {"trajectory", trajectory_to_json(traj)}}.dump(2) + "\n";
  }

  if (command == "h2-retract") {
    if (format == "csv") throw std::invalid_argument("csv not supported for h2-retract");
    const std::complex<double> z = parse_complex(cfg.at("z").get<std::string>());
    const std::complex<double> w = retract_h2(z);
    return json{{"config", echo}, {"z", {{"re", w.real()}, {"im", w.imag()}}}}.dump(2) + "\n";
  }

  const FNPoint p = parse_fn(json::parse(load_arg(cfg.at("fn").get<std::string>())));
  SpectrumParams sp;
  sp.hard_cap = cfg.value("max_word_len", sp.hard_cap);
  const double tol_sys = cfg.value("tol_sys", kTolSys);
  if (!(tol_sys > 0)) throw std::invalid_argument("tol_sys must be positive");

  if (command == "spectrum") {
    const double cutoff = cfg.at("cutoff").get<double>();
    const auto classes = length_spectrum(fn_to_group(p), cutoff, sp);
    if (format == "csv") return spectrum_to_csv(classes);
    return json{{"config", echo}, {"classes", classes_to_json(classes)}}.dump(2) + "\n";
  }

  if (command == "systoles") {
    const SystoleSet s = systole_set(fn_to_group(p), tol_sys, sp);
    if (format == "csv") return spectrum_to_csv(s.classes);
    return json{{"config", echo}, {"systoles", systoles_to_json(s)}}.dump(2) + "\n";
  }

  if (command == "surface-retract") {
    FlowParams fp;
    fp.eps = cfg.value("eps", fp.eps);
    fp.tol_sys = tol_sys;
    fp.spectrum = sp;
    const StopRule stop = parse_stop(cfg.value("stop", std::string("thick")));
    const SurfaceTrajectory traj = flow(p, stop, fp);
    if (format == "csv") return trajectory_to_csv(traj);
    return json{{"config", echo}, {"trajectory", trajectory_to_json(traj)}}.dump(2) + "\n";
  }

  throw std::invalid_argument("unknown command: " + command);
}

// Runs one config and routes the output; returns the process exit code.
int run_and_emit(const json& cfg, std::ostream& err) {
  try {
    const std::string payload = run_config(cfg);
    if (cfg.contains("out") && !cfg.at("out").get<std::string>().empty())
      write_atomic(cfg.at("out").get<std::string>(), payload);
    else
      std::cout << payload;
    return 0;
  } catch (const std::ios_base::failure& e) {
    err << "io error: " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

int run_batch(const std::string& configs_arg, int jobs) {
  json arr;
  try {
    arr = json::parse(load_arg(configs_arg));
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (!arr.is_array()) {
    std::cerr << "error: batch input must be a JSON array of configs\n";
    return 2;
  }
  for (const auto& c : arr)
    if (!c.is_object() || !c.contains("out")) {
      std::cerr << "error: every batch config needs an \"out\" path\n";
      return 2;
    }

  std::vector<int> codes(arr.size(), 0);
  std::vector<std::string> errs(arr.size());
  std::size_t next = 0;
  std::mutex mtx;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(mtx);
        if (next >= arr.size()) return;
        i = next++;
      }
      std::ostringstream err;
      codes[i] = run_and_emit(arr.at(i), err);
      errs[i] = err.str();
    }
  };
  std::vector<std::thread> pool;
  const int n = std::max(1, jobs);
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  int code = 0;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (codes[i] != 0) {
      std::cerr << "config " << i << ": " << errs[i];
      code = std::max(code, codes[i]);
    }
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"roundwalk: well-rounded lattice retraction and systole-equalizing flows"};
  app.require_subcommand(0, 1);

  json cfg;
  std::string basis, z, fn, stop = "thick", format = "json", out, configs;
  double eps = 1.0, tol_sys = kTolSys, cutoff = 0;
  int max_word_len = 16, jobs = 1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", format, "json|csv")->capture_default_str();
    sub->add_option("--out", out, "output path (written atomically)");
  };
  auto add_fn_common = [&](CLI::App* sub) {
    sub->add_option("--fn", fn, "FN point [[l1,l2,l3],[t1,t2,t3]] or @file")->required();
    sub->add_option("--tol-sys", tol_sys, "systole equality tolerance")->capture_default_str();
    sub->add_option("--max-word-len", max_word_len, "word-length hard cap")
        ->capture_default_str();
    add_common(sub);
  };

  auto* c_lat = app.add_subcommand("lattice-retract", "retract a unimodular lattice");
  c_lat->add_option("--basis", basis, "basis rows [[...],...] or @file")->required();
  add_common(c_lat);

  auto* c_h2 = app.add_subcommand("h2-retract", "closed-form retraction on the H^2 domain");
  c_h2->add_option("--z", z, "upper half-plane point, e.g. 0.1+1.2i")->required();
  add_common(c_h2);

  auto* c_spec = app.add_subcommand("spectrum", "length spectrum up to a cutoff");
  c_spec->add_option("--cutoff", cutoff, "length cutoff")->required();
  add_fn_common(c_spec);

  auto* c_sys = app.add_subcommand("systoles", "systole set with intersection pairs");
  add_fn_common(c_sys);

  auto* c_surf = app.add_subcommand("surface-retract", "systole-equalizing flow");
  c_surf->add_option("--stop", stop, "thick|spine|s2")->capture_default_str();
  c_surf->add_option("--eps", eps, "thick-part threshold")->capture_default_str();
  add_fn_common(c_surf);

  auto* c_batch = app.add_subcommand("batch", "run a JSON array of configs");
  c_batch->add_option("--configs", configs, "JSON array of configs or @file")->required();
  c_batch->add_option("--jobs", jobs, "worker threads")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 64;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return 64;
  }
  const CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();

  if (command == "batch") return run_batch(configs, jobs);

  cfg["command"] = command;
  cfg["format"] = format;
  if (!out.empty()) cfg["out"] = out;
  if (sub == c_lat) cfg["basis"] = basis;
  if (sub == c_h2) cfg["z"] = z;
  if (sub == c_spec || sub == c_sys || sub == c_surf) {
    cfg["fn"] = fn;
    cfg["tol_sys"] = tol_sys;
    cfg["max_word_len"] = max_word_len;
  }
  if (sub == c_spec) cfg["cutoff"] = cutoff;
  if (sub == c_surf) {
    cfg["stop"] = stop;
    cfg["eps"] = eps;
  }
  return run_and_emit(cfg, std::cerr);
}
