#include "bbq/config.hpp"

#include <fstream>
#include <set>

#include "json.hpp"

namespace bbq {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) {
  throw ConfigError("config: " + msg);
}

const json& section(const json& root, const char* name) {
  if (!root.contains(name)) fail(std::string("missing section '") + name + "'");
  if (!root.at(name).is_object())
    fail(std::string("section '") + name + "' must be an object");
  return root.at(name);
}

void check_keys(const json& obj, const char* name,
                const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      fail(std::string("unknown key '") + name + "." + it.key() + "'");
}

double num(const json& obj, const char* sec, const char* key) {
  if (!obj.contains(key))
    fail(std::string("missing key '") + sec + "." + key + "'");
  if (!obj.at(key).is_number())
    fail(std::string("key '") + sec + "." + key + "' must be a number");
  return obj.at(key).get<double>();
}

double num_or(const json& obj, const char* key, double fallback) {
  return obj.contains(key) ? obj.at(key).get<double>() : fallback;
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) fail("top level must be an object");
  check_keys(root, "", {"grid", "model", "stepper", "init", "diagnostics",
                        "sweep", "output"});

  RunConfig cfg;
  try {
    const json& g = section(root, "grid");
    check_keys(g, "grid", {"n", "L", "dealias_fraction"});
    cfg.grid.n = int(num(g, "grid", "n"));
    cfg.grid.domain_length = num(g, "grid", "L");
    cfg.grid.dealias_fraction =
        num_or(g, "dealias_fraction", cfg.grid.dealias_fraction);
    cfg.grid.validate();

    const json& m = section(root, "model");
    check_keys(m, "model", {"nu", "lambda", "N"});
    cfg.nu = num(m, "model", "nu");
    cfg.lambda = num(m, "model", "lambda");
    if (m.contains("N") && !m.at("N").is_null())
      cfg.cutoff_N = m.at("N").get<double>();

    const json& st = section(root, "stepper");
    check_keys(st, "stepper", {"dt", "t_end", "sample_every"});
    cfg.dt = num(st, "stepper", "dt");
    cfg.t_end = num(st, "stepper", "t_end");
    cfg.sample_every = int(num(st, "stepper", "sample_every"));

    const json& in = section(root, "init");
    check_keys(in, "init",
               {"shape", "seed", "target_grad_u_besov",
                "target_grad_theta_besov", "band_lo", "band_hi", "file_u1",
                "file_u2", "file_theta"});
    const std::string shape = in.value("shape", "");
    if (shape == "taylor_green")
      cfg.init.shape = InitShape::taylor_green;
    else if (shape == "random_band")
      cfg.init.shape = InitShape::random_band;
    else if (shape == "file")
      cfg.init.shape = InitShape::file;
    else
      fail("init.shape must be taylor_green | random_band | file");
    cfg.init.seed = std::uint64_t(num_or(in, "seed", 0.0));
    cfg.init.target_grad_u_besov = num(in, "init", "target_grad_u_besov");
    cfg.init.target_grad_theta_besov =
        num(in, "init", "target_grad_theta_besov");
    if (cfg.init.target_grad_u_besov < 0.0 ||
        cfg.init.target_grad_theta_besov < 0.0)
      fail("init targets must be >= 0");
    cfg.init.band_lo = int(num_or(in, "band_lo", 1));
    cfg.init.band_hi = int(num_or(in, "band_hi", 8));
    if (cfg.init.band_lo < 1 || cfg.init.band_hi < cfg.init.band_lo)
      fail("init band must satisfy 1 <= band_lo <= band_hi");
    cfg.init.file_u1 = in.value("file_u1", "");
    cfg.init.file_u2 = in.value("file_u2", "");
    cfg.init.file_theta = in.value("file_theta", "");
    if (cfg.init.shape == InitShape::file &&
        (cfg.init.file_u1.empty() || cfg.init.file_u2.empty() ||
         cfg.init.file_theta.empty()))
      fail("init.shape = file requires file_u1, file_u2, file_theta");

    if (root.contains("diagnostics")) {
      const json& d = section(root, "diagnostics");
      check_keys(d, "diagnostics", {"q_list", "s_list", "c0_override"});
      if (d.contains("q_list"))
        cfg.diagnostics.q_list = d.at("q_list").get<std::vector<double>>();
      if (d.contains("s_list"))
        cfg.diagnostics.s_list = d.at("s_list").get<std::vector<double>>();
      if (d.contains("c0_override") && !d.at("c0_override").is_null()) {
        cfg.c0_override = d.at("c0_override").get<double>();
        if (!(*cfg.c0_override > 0.0)) fail("diagnostics.c0_override must be > 0");
      }
    }
    for (double q : cfg.diagnostics.q_list)
      if (!(q >= 2.0) || std::isinf(q))
        fail("diagnostics.q_list entries must be finite and >= 2");
    for (double s : cfg.diagnostics.s_list)
      if (!(s > 2.0)) fail("diagnostics.s_list entries must be > 2");

    if (root.contains("sweep")) {
      const json& sw = section(root, "sweep");
      check_keys(sw, "sweep", {"param", "values"});
      RunConfig::Sweep sweep;
      sweep.param = sw.value("param", "");
      if (sweep.param != "model.nu" && sweep.param != "model.lambda" &&
          sweep.param != "init.amplitude")
        fail("sweep.param must be model.nu | model.lambda | init.amplitude");
      if (sw.contains("values"))
        sweep.values = sw.at("values").get<std::vector<double>>();
      if (sweep.values.empty()) fail("sweep.values must be nonempty");
      for (double v : sweep.values)
        if (!(v > 0.0)) fail("sweep.values must be positive");
      cfg.sweep = std::move(sweep);
    }

    const json& out = section(root, "output");
    check_keys(out, "output", {"dir", "snapshot_every"});
    cfg.output_dir = out.value("dir", "");
    if (cfg.output_dir.empty()) fail("output.dir must be set");
    cfg.snapshot_every = int(num_or(out, "snapshot_every", 0));
    if (cfg.snapshot_every < 0) fail("output.snapshot_every must be >= 0");
  } catch (const json::exception& e) {
    fail(std::string("bad value type: ") + e.what());
  }

  if (!(cfg.nu > 0.0) || !(cfg.lambda > 0.0)) fail("model damping must be > 0");
  if (cfg.cutoff_N && !(*cfg.cutoff_N > 0.0)) fail("model.N must be > 0");
  if (!(cfg.dt > 0.0)) fail("stepper.dt must be > 0");
  if (!(cfg.t_end >= 0.0)) fail("stepper.t_end must be >= 0");
  if (cfg.sample_every < 1) fail("stepper.sample_every must be >= 1");
  return cfg;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json_text(text);
}

std::string RunConfig::echo() const {
  json j;
  j["grid"] = {{"n", grid.n},
               {"L", grid.domain_length},
               {"dealias_fraction", grid.dealias_fraction}};
  j["model"] = {{"nu", nu}, {"lambda", lambda}};
  j["model"]["N"] = cutoff_N ? json(*cutoff_N) : json(nullptr);
  j["stepper"] = {{"dt", dt}, {"t_end", t_end}, {"sample_every", sample_every}};
  const char* shape = init.shape == InitShape::taylor_green ? "taylor_green"
                      : init.shape == InitShape::random_band ? "random_band"
                                                             : "file";
  j["init"] = {{"shape", shape},
               {"seed", init.seed},
               {"target_grad_u_besov", init.target_grad_u_besov},
               {"target_grad_theta_besov", init.target_grad_theta_besov},
               {"band_lo", init.band_lo},
               {"band_hi", init.band_hi}};
  if (init.shape == InitShape::file) {
    j["init"]["file_u1"] = init.file_u1;
    j["init"]["file_u2"] = init.file_u2;
    j["init"]["file_theta"] = init.file_theta;
  }
  j["diagnostics"] = {{"q_list", diagnostics.q_list},
                      {"s_list", diagnostics.s_list}};
  j["diagnostics"]["c0_override"] =
      c0_override ? json(*c0_override) : json(nullptr);
  if (sweep)
    j["sweep"] = {{"param", sweep->param}, {"values", sweep->values}};
  j["output"] = {{"dir", output_dir}, {"snapshot_every", snapshot_every}};
  return j.dump(2) + "\n";
}

}  // namespace bbq
