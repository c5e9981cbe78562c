#include "pmflow/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace pmflow {
namespace fs = std::filesystem;

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

double tick_round(double x) {
  if (x == 0.0) return 0.0;
  double mag = std::pow(10.0, std::floor(std::log10(std::fabs(x))));
  return std::round(x / mag) * mag;
}

std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

void write_line_chart_svg(const std::string& path, const std::string& title,
                          const std::string& xlabel, const std::string& ylabel,
                          const std::vector<ChartSeries>& series, bool log_x,
                          bool log_y) {
  const double W = 720, H = 440;
  const double ml = 70, mr = 160, mt = 40, mb = 50;
  const double pw = W - ml - mr, ph = H - mt - mb;

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      double x = s.x[i], y = s.y[i];
      if (log_x && !(x > 0.0)) continue;
      if (log_y && !(y > 0.0)) continue;
      if (log_x) x = std::log10(x);
      if (log_y) y = std::log10(y);
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (!(xmin <= xmax)) { xmin = 0; xmax = 1; }
  if (!(ymin <= ymax)) { ymin = 0; ymax = 1; }
  if (xmax - xmin < 1e-12) { xmax += 0.5; xmin -= 0.5; }
  if (ymax - ymin < 1e-12) { ymax += 0.5; ymin -= 0.5; }

  auto px = [&](double x) {
    if (log_x) x = std::log10(x);
    return ml + pw * (x - xmin) / (xmax - xmin);
  };
  auto py = [&](double y) {
    if (log_y) y = std::log10(y);
    return mt + ph * (1.0 - (y - ymin) / (ymax - ymin));
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << W << " "
      << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" "
         "font-size=\"15\">" << title << "</text>\n";
  out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw
      << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"#444\"/>\n";

  for (int k = 0; k <= 4; ++k) {
    double fx = xmin + (xmax - xmin) * k / 4.0;
    double fy = ymin + (ymax - ymin) * k / 4.0;
    double vx = log_x ? std::pow(10.0, fx) : tick_round(fx);
    double vy = log_y ? std::pow(10.0, fy) : tick_round(fy);
    double sx = ml + pw * k / 4.0;
    double sy = mt + ph * (1.0 - k / 4.0);
    out << "<line x1=\"" << sx << "\" y1=\"" << mt + ph << "\" x2=\"" << sx
        << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"#444\"/>\n";
    out << "<text x=\"" << sx << "\" y=\"" << mt + ph + 18
        << "\" text-anchor=\"middle\">" << fmt_tick(vx) << "</text>\n";
    out << "<line x1=\"" << ml - 5 << "\" y1=\"" << sy << "\" x2=\"" << ml
        << "\" y2=\"" << sy << "\" stroke=\"#444\"/>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << sy + 4
        << "\" text-anchor=\"end\">" << fmt_tick(vy) << "</text>\n";
  }
  out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << H - 10
      << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
  out << "<text x=\"16\" y=\"" << mt + ph / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << mt + ph / 2
      << ")\">" << ylabel << "</text>\n";

  int ci = 0;
  for (const auto& s : series) {
    const char* color = kPalette[ci % 8];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.6\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (log_x && !(s.x[i] > 0.0)) continue;
      if (log_y && !(s.y[i] > 0.0)) continue;
      out << px(s.x[i]) << "," << py(s.y[i]) << " ";
    }
    out << "\"/>\n";
    double ly = mt + 16 + 18.0 * ci;
    out << "<line x1=\"" << ml + pw + 10 << "\" y1=\"" << ly << "\" x2=\""
        << ml + pw + 30 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << ml + pw + 35 << "\" y=\"" << ly + 4 << "\">"
        << s.label << "</text>\n";
    ++ci;
  }
  out << "</svg>\n";

  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_line_chart_svg: cannot open " + path);
  f << out.str();
}

void write_manifest(const std::string& dir, const std::string& subcommand,
                    const std::string& config_hash, bool complete,
                    const std::vector<std::string>& outputs) {
  nlohmann::json j;
  j["format"] = "pmflow-manifest-1";
  j["subcommand"] = subcommand;
  j["config_hash"] = config_hash;
  j["complete"] = complete;
  j["outputs"] = outputs;
  std::ofstream out(dir + "/MANIFEST.json");
  if (!out) throw std::runtime_error("write_manifest: cannot open " + dir);
  out << j.dump(2) << "\n";
}

int CsvTable::col(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

double CsvTable::num(std::size_t row, int c) const {
  if (c < 0 || row >= rows.size() ||
      static_cast<std::size_t>(c) >= rows[row].size())
    throw std::out_of_range("csv: bad cell reference");
  return std::strtod(rows[row][c].c_str(), nullptr);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t pos = 0;
    while (true) {
      std::size_t comma = line.find(',', pos);
      cells.push_back(line.substr(pos, comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (first) {
      t.header = cells;
      first = false;
    } else {
      t.rows.push_back(cells);
    }
  }
  return t;
}

namespace {

std::string hash_of_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) return "";
  nlohmann::json j;
  try {
    in >> j;
  } catch (...) {
    return "";
  }
  return j.value("config_hash", "");
}

void chart_from_series_files(const fs::path& dir, std::ofstream& index) {
  std::vector<fs::path> series_files;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::string name = e.path().filename().string();
    if (name.rfind("series_g", 0) == 0 && e.path().extension() == ".csv")
      series_files.push_back(e.path());
    if (name == "series.csv") series_files.push_back(e.path());
  }
  std::sort(series_files.begin(), series_files.end(),
            [](const fs::path& a, const fs::path& b) {
              auto tag = [](const fs::path& p) {
                std::string s = p.filename().string();
                std::size_t start = s.find("_g");
                if (start == std::string::npos) return 0.0;
                return std::strtod(s.c_str() + start + 2, nullptr);
              };
              return tag(a) < tag(b);
            });
  if (series_files.empty()) return;

  std::vector<ChartSeries> psup, mass, energy;
  for (const auto& f : series_files) {
    CsvTable t = read_csv(f.string());
    int ct = t.col("t"), cp = t.col("p_sup"), cm = t.col("mass"),
        ce = t.col("energy_gamma");
    if (ct < 0) continue;
    ChartSeries sp, sm, se;
    std::string label = f.filename().stem().string();
    if (label.rfind("series_", 0) == 0) label = label.substr(7);
    sp.label = sm.label = se.label = label;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      double tt = t.num(r, ct);
      sp.x.push_back(tt);
      sm.x.push_back(tt);
      se.x.push_back(tt);
      if (cp >= 0) sp.y.push_back(t.num(r, cp));
      if (cm >= 0) sm.y.push_back(t.num(r, cm));
      if (ce >= 0) se.y.push_back(t.num(r, ce));
    }
    if (!sp.y.empty()) psup.push_back(sp);
    if (!sm.y.empty()) mass.push_back(sm);
    if (!se.y.empty()) energy.push_back(se);
  }
  fs::path rep = dir / "report";
  if (!psup.empty()) {
    write_line_chart_svg((rep / "p_sup.svg").string(), "sup of pressure", "t",
                         "sup p", psup, false, false);
    index << "![sup of pressure](report/p_sup.svg)\n\n";
  }
  if (!mass.empty()) {
    write_line_chart_svg((rep / "mass.svg").string(), "total mass", "t", "mass",
                         mass, false, false);
    index << "![total mass](report/mass.svg)\n\n";
  }
  if (!energy.empty()) {
    write_line_chart_svg((rep / "energy.svg").string(), "energy", "t",
                         "E_gamma", energy, false, false);
    index << "![energy](report/energy.svg)\n\n";
  }
}

}  // namespace

void write_report(const std::string& dir_in) {
  fs::path dir(dir_in);
  if (!fs::exists(dir / "MANIFEST.json"))
    throw std::runtime_error("report: no MANIFEST.json in " + dir_in);

  // every hash-bearing file must agree
  std::set<std::string> hashes;
  std::string h = hash_of_json(dir / "MANIFEST.json");
  if (!h.empty()) hashes.insert(h);
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".json") continue;
    std::string name = e.path().filename().string();
    if (name == "MANIFEST.json" || name.rfind("summary", 0) == 0) {
      std::string hh = hash_of_json(e.path());
      if (!hh.empty()) hashes.insert(hh);
    }
  }
  if (fs::exists(dir / "limit_fields" / "limit.json")) {
    std::string hh = hash_of_json(dir / "limit_fields" / "limit.json");
    if (!hh.empty()) hashes.insert(hh);
  }
  if (hashes.size() > 1)
    throw std::runtime_error("report: config hashes disagree in " + dir_in);

  fs::create_directories(dir / "report");
  std::ofstream index(dir / "index.md");
  if (!index) throw std::runtime_error("report: cannot open index.md");
  index << "# run report\n\n";
  if (!hashes.empty()) index << "config hash: `" << *hashes.begin() << "`\n\n";

  if (fs::exists(dir / "sweep.csv")) {
    CsvTable t = read_csv((dir / "sweep.csv").string());
    int cg = t.col("gamma");
    const char* cols[] = {"acc_grad_p_l4", "acc_p_hess", "acc_lap_sig",
                          "acc_grad_sig_l4"};
    std::vector<ChartSeries> acc;
    for (const char* cname : cols) {
      int cc = t.col(cname);
      if (cc < 0) continue;
      ChartSeries s;
      s.label = cname;
      for (std::size_t r = 0; r < t.rows.size(); ++r) {
        s.x.push_back(t.num(r, cg));
        s.y.push_back(t.num(r, cc));
      }
      acc.push_back(s);
    }
    write_line_chart_svg((dir / "report" / "uniformity.svg").string(),
                         "accumulated functionals across stiffness", "gamma",
                         "value", acc, true, false);
    index << "![uniformity](report/uniformity.svg)\n\n";
  }
  if (fs::exists(dir / "cauchy.csv")) {
    CsvTable t = read_csv((dir / "cauchy.csv").string());
    int cb = t.col("gamma_b"), cn = t.col("n_l2_sup"), cs = t.col("sigma_l2h1");
    std::vector<ChartSeries> cs_list;
    ChartSeries a, b;
    a.label = "sup_t L2(n diff)";
    b.label = "L2H1(sigma diff)";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      a.x.push_back(t.num(r, cb));
      a.y.push_back(t.num(r, cn));
      b.x.push_back(t.num(r, cb));
      b.y.push_back(t.num(r, cs));
    }
    cs_list.push_back(a);
    cs_list.push_back(b);
    write_line_chart_svg((dir / "report" / "cauchy.svg").string(),
                         "consecutive stiffness differences", "gamma",
                         "difference", cs_list, true, true);
    index << "![cauchy](report/cauchy.svg)\n\n";
  }
  if (fs::exists(dir / "focusing.csv")) {
    CsvTable t = read_csv((dir / "focusing.csv").string());
    int cg = t.col("gamma");
    const char* cols[] = {"grad_p_l2_max", "grad_p_l4_max", "grad_p_l6_max",
                          "grad_p_l8_max"};
    std::vector<ChartSeries> qs;
    for (const char* cname : cols) {
      int cc = t.col(cname);
      if (cc < 0) continue;
      ChartSeries s;
      s.label = cname;
      for (std::size_t r = 0; r < t.rows.size(); ++r) {
        s.x.push_back(t.num(r, cg));
        s.y.push_back(t.num(r, cc));
      }
      qs.push_back(s);
    }
    write_line_chart_svg((dir / "report" / "focusing.svg").string(),
                         "max-in-time gradient norms", "gamma", "norm", qs,
                         true, true);
    index << "![focusing](report/focusing.svg)\n\n";
  }
  chart_from_series_files(dir, index);
  index << "\n";
}

}  // namespace pmflow
