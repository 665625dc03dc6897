#include "holo/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "holo/ctensor.hpp"
#include "holo/experiment.hpp"
#include <nlohmann/json.hpp>

namespace holo {

namespace fs = std::filesystem;
using nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string variant_label(bool phase_decay, bool coherent_sum, bool reconstruction,
                          bool magnitude_only) {
  std::vector<std::string> parts;
  if (magnitude_only) parts.emplace_back("magnitude only");
  if (phase_decay) parts.emplace_back("w/o phase decay");
  if (coherent_sum) parts.emplace_back("w/o coherent sum");
  if (reconstruction) parts.emplace_back("w/o reconstruction");
  if (parts.empty()) return "full";
  std::string s = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) s += "+" + parts[i];
  return s;
}

namespace {

json read_json(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot read " + p.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(p.string() + ": " + e.what());
  }
}

std::vector<json> read_jsonl(const fs::path& p) {
  std::vector<json> rows;
  std::ifstream in(p, std::ios::binary);
  if (!in) return rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(json::parse(line));
  }
  return rows;
}

std::string num(double v) { return ojson(v).dump(); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

struct Run {
  std::string name;
  std::string task;
  std::string variant;
  std::uint64_t seed = 0;
  json metrics;
  std::vector<json> history;
  std::vector<json> robustness;
};

double headline(const Run& r) {
  return r.task == "classification" ? r.metrics.at("accuracy").get<double>()
                                    : r.metrics.at("mae").get<double>();
}

}  // namespace

ReportResult cmd_report(const fs::path& root) {
  if (!fs::is_directory(root)) throw DataError("report: no such directory " + root.string());

  std::vector<std::pair<std::string, fs::path>> dirs;
  if (fs::exists(root / "config.json")) dirs.emplace_back(".", root);
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory() && fs::exists(e.path() / "config.json")) {
      dirs.emplace_back(e.path().filename().string(), e.path());
    }
  }
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) throw DataError("report: no runs under " + root.string());

  ReportResult res;
  res.out_dir = root / "report";
  std::vector<Run> runs;
  for (const auto& [name, dir] : dirs) {
    if (!fs::exists(dir / "metrics.json")) {
      res.missing.push_back(name);
      continue;
    }
    Run r;
    r.name = name;
    const auto cfg = read_json(dir / "config.json");
    const auto& m = cfg.at("model");
    r.task = m.at("task").get<std::string>();
    r.variant = variant_label(m.value("ablate_phase_decay", false),
                              m.value("ablate_coherent_sum", false),
                              m.value("ablate_reconstruction", false),
                              m.value("magnitude_only", false));
    r.seed = cfg.value("seed", std::uint64_t{0});
    r.metrics = read_json(dir / "metrics.json");
    r.history = read_jsonl(dir / "history.jsonl");
    for (const char* axis : {"sigma", "tau"}) {
      const auto p = dir / (std::string("robustness_") + axis + ".json");
      if (fs::exists(p)) r.robustness.push_back(read_json(p));
    }
    res.runs.push_back(name);
    runs.push_back(std::move(r));
  }

  std::string runs_csv = "run,task,variant,seed,n,accuracy,macro_f1,micro_f1,mae,rmse,loss_total\n";
  ojson runs_json = ojson::array();
  for (const auto& r : runs) {
    const auto& m = r.metrics;
    auto get = [&](const char* k) { return m.contains(k) ? num(m[k].get<double>()) : ""; };
    runs_csv += csv_field(r.name) + "," + r.task + "," + csv_field(r.variant) + "," +
                std::to_string(r.seed) + "," + std::to_string(m.at("n").get<std::size_t>()) + "," +
                get("accuracy") + "," + get("macro_f1") + "," + get("micro_f1") + "," + get("mae") +
                "," + get("rmse") + "," + num(m.at("loss").at("total").get<double>()) + "\n";
    ojson row;
    row["run"] = r.name;
    row["task"] = r.task;
    row["variant"] = r.variant;
    row["seed"] = r.seed;
    row["metrics"] = m;
    runs_json.push_back(row);
  }

  // (task, variant) -> headline values in run order
  std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
  for (const auto& r : runs) groups[{r.task, r.variant}].push_back(headline(r));
  std::string abl_csv = "task,variant,metric,runs,mean,std\n";
  ojson abl_json = ojson::array();
  for (const auto& [key, vals] : groups) {
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    double ss = 0.0;
    for (double v : vals) ss += (v - mean) * (v - mean);
    const double sd = vals.size() > 1 ? std::sqrt(ss / static_cast<double>(vals.size() - 1)) : 0.0;
    const std::string metric = key.first == "classification" ? "accuracy" : "mae";
    abl_csv += key.first + "," + csv_field(key.second) + "," + metric + "," +
               std::to_string(vals.size()) + "," + num(mean) + "," + num(sd) + "\n";
    abl_json.push_back({{"task", key.first},
                        {"variant", key.second},
                        {"metric", metric},
                        {"runs", vals.size()},
                        {"mean", mean},
                        {"std", sd}});
  }

  std::string rob_csv = "run,variant,axis,metric,level,value,change,change_pct,rauc\n";
  std::string plot_csv = "x,y,series\n";
  ojson rob_json = ojson::array();
  for (const auto& r : runs) {
    for (const auto& h : r.history) {
      plot_csv += num(h.at("epoch").get<double>()) + "," +
                  num(h.at("loss").at("total").get<double>()) + "," +
                  csv_field(r.name + "/loss") + "\n";
    }
    for (const auto& rb : r.robustness) {
      const auto axis = rb.at("axis").get<std::string>();
      const auto grid = rb.at("grid").get<std::vector<double>>();
      const auto vals = rb.at("values").get<std::vector<double>>();
      const auto chg = rb.at("relative_change_pct").get<std::vector<double>>();
      for (std::size_t i = 0; i < grid.size(); ++i) {
        rob_csv += csv_field(r.name) + "," + csv_field(r.variant) + "," + axis + "," +
                   rb.at("metric").get<std::string>() + "," + num(grid[i]) + "," + num(vals[i]) +
                   "," + rb.at("change").get<std::string>() + "," + num(chg[i]) + "," +
                   num(rb.at("rauc").get<double>()) + "\n";
        plot_csv += num(grid[i]) + "," + num(vals[i]) + "," + csv_field(r.name + "/" + axis) + "\n";
      }
      ojson row = ojson::parse(rb.dump());
      row["run"] = r.name;
      row["variant"] = r.variant;
      rob_json.push_back(row);
    }
  }

  ojson rep;
  rep["runs"] = runs_json;
  rep["ablation"] = abl_json;
  rep["robustness"] = rob_json;
  rep["missing"] = res.missing;

  write_text(res.out_dir / "runs.csv", runs_csv);
  write_text(res.out_dir / "ablation.csv", abl_csv);
  write_text(res.out_dir / "robustness.csv", rob_csv);
  write_text(res.out_dir / "plot_data.csv", plot_csv);
  write_text(res.out_dir / "report.json", rep.dump(2) + "\n");
  return res;
}

}  // namespace holo
