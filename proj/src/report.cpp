#include "rearing/analysis/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "rearing/core/errors.hpp"
#include "rearing/core/textio.hpp"

namespace rearing::analysis {

namespace {

constexpr double kChickFamiliar = 0.79;
constexpr double kChickNovel = 0.69;

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string f2(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

// compressed viridis ramp, t in [0,1]
std::string ramp_color(double t) {
    static const double stops[][3] = {
        {0.267, 0.005, 0.329}, {0.254, 0.265, 0.530}, {0.164, 0.471, 0.558},
        {0.135, 0.659, 0.518}, {0.478, 0.821, 0.318}, {0.993, 0.906, 0.144},
    };
    t = std::clamp(t, 0.0, 1.0);
    const double pos = t * 5.0;
    const int lo = std::min(4, static_cast<int>(pos));
    const double f = pos - lo;
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                  static_cast<int>(std::lround(255.0 * (stops[lo][0] * (1 - f) + stops[lo + 1][0] * f))),
                  static_cast<int>(std::lround(255.0 * (stops[lo][1] * (1 - f) + stops[lo + 1][1] * f))),
                  static_cast<int>(std::lround(255.0 * (stops[lo][2] * (1 - f) + stops[lo + 1][2] * f))));
    return buf;
}

std::string class_color(int index, int n_classes) {
    const double h = 360.0 * index / std::max(1, n_classes);
    const double s = 0.75, v = 0.85;
    const double c = v * s;
    const double hp = h / 60.0;
    const double xx = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    switch (static_cast<int>(hp) % 6) {
        case 0: r = c; g = xx; break;
        case 1: r = xx; g = c; break;
        case 2: g = c; b = xx; break;
        case 3: g = xx; b = c; break;
        case 4: r = xx; b = c; break;
        default: r = c; b = xx; break;
    }
    const double m = v - c;
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", static_cast<int>(std::lround(255 * (r + m))),
                  static_cast<int>(std::lround(255 * (g + m))),
                  static_cast<int>(std::lround(255 * (b + m))));
    return buf;
}

std::string cell_key(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "o%d_r%02d", index / 12 + 1, index % 12 + 1);
    return buf;
}

std::string bar_chart_svg(const std::string& scheme,
                          const std::vector<std::pair<std::string, std::pair<double, double>>>& bars) {
    const int n = static_cast<int>(bars.size());
    const double x0 = 70, y0 = 24, ph = 280, bw = 48, gap = 80;
    const double baseline = y0 + ph;
    const double width = x0 + 30 + n * gap + 90;
    const double height = baseline + 70;
    auto ya = [&](double acc) { return baseline - acc * ph; };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f2(width) << "\" height=\""
      << f2(height) << "\" viewBox=\"0 0 " << f2(width) << " " << f2(height) << "\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << f2(width / 2) << "\" y=\"16\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">linear probe accuracy, " << scheme << "</text>\n";
    for (int i = 0; i <= 4; ++i) {
        const double acc = 0.25 * i;
        s << "<line x1=\"" << f2(x0) << "\" y1=\"" << f2(ya(acc)) << "\" x2=\"" << f2(width - 80)
          << "\" y2=\"" << f2(ya(acc)) << "\" stroke=\"#dddddd\"/>\n";
        s << "<text x=\"" << f2(x0 - 8) << "\" y=\"" << f2(ya(acc) + 4)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << f2(acc)
          << "</text>\n";
    }
    struct Ref { double v; const char* dash; const char* label; };
    const Ref refs[] = {{0.5, "4 3", "chance"},
                        {kChickFamiliar, "", "chick familiar"},
                        {kChickNovel, "7 3", "chick novel"}};
    for (const Ref& r : refs) {
        const char* color = r.v == 0.5 ? "#888888" : "#c0392b";
        s << "<line x1=\"" << f2(x0) << "\" y1=\"" << f2(ya(r.v)) << "\" x2=\"" << f2(width - 80)
          << "\" y2=\"" << f2(ya(r.v)) << "\" stroke=\"" << color << "\"";
        if (*r.dash) s << " stroke-dasharray=\"" << r.dash << "\"";
        s << "/>\n<text x=\"" << f2(width - 76) << "\" y=\"" << f2(ya(r.v) + 4)
          << "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"" << color << "\">" << r.label
          << "</text>\n";
    }
    for (int i = 0; i < n; ++i) {
        const double cx = x0 + 30 + i * gap + bw / 2;
        const double mean = bars[static_cast<std::size_t>(i)].second.first;
        const double se = bars[static_cast<std::size_t>(i)].second.second;
        s << "<rect x=\"" << f2(cx - bw / 2) << "\" y=\"" << f2(ya(mean)) << "\" width=\""
          << f2(bw) << "\" height=\"" << f2(baseline - ya(mean))
          << "\" fill=\"#4878a8\"/>\n";
        if (se > 0.0) {
            s << "<line x1=\"" << f2(cx) << "\" y1=\"" << f2(ya(mean - se)) << "\" x2=\"" << f2(cx)
              << "\" y2=\"" << f2(ya(mean + se)) << "\" stroke=\"#222222\"/>\n";
            for (const double e : {mean - se, mean + se}) {
                s << "<line x1=\"" << f2(cx - 6) << "\" y1=\"" << f2(ya(e)) << "\" x2=\""
                  << f2(cx + 6) << "\" y2=\"" << f2(ya(e)) << "\" stroke=\"#222222\"/>\n";
            }
        }
        char val[16];
        std::snprintf(val, sizeof(val), "%.3f", mean);
        s << "<text x=\"" << f2(cx) << "\" y=\"" << f2(ya(mean) - 6)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << val
          << "</text>\n";
        s << "<text x=\"" << f2(cx) << "\" y=\"" << f2(baseline + 14) << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\" transform=\"rotate(-30 "
          << f2(cx) << " " << f2(baseline + 14) << ")\">" << bars[static_cast<std::size_t>(i)].first
          << "</text>\n";
    }
    s << "<line x1=\"" << f2(x0) << "\" y1=\"" << f2(y0) << "\" x2=\"" << f2(x0) << "\" y2=\""
      << f2(baseline) << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << f2(x0) << "\" y1=\"" << f2(baseline) << "\" x2=\"" << f2(width - 80)
      << "\" y2=\"" << f2(baseline) << "\" stroke=\"black\"/>\n";
    s << "</svg>\n";
    return s.str();
}

std::string heatmap_svg(const std::string& title, const Rdm& rdm, bool similarity) {
    const double cell = 14, x0 = 64, y0 = 44;
    const double grid = cell * kConditionCells;
    const double width = x0 + grid + 24, height = y0 + grid + 40;
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f2(width) << "\" height=\""
      << f2(height) << "\" viewBox=\"0 0 " << f2(width) << " " << f2(height) << "\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << f2(x0 + grid / 2) << "\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << title << "</text>\n";
    for (int i = 0; i < kConditionCells; ++i) {
        for (int j = 0; j < kConditionCells; ++j) {
            const double d = rdm.at(i, j);
            const double t = similarity ? (1.0 - d + 1.0) / 2.0 : d / 2.0;
            s << "<rect x=\"" << f2(x0 + j * cell) << "\" y=\"" << f2(y0 + i * cell)
              << "\" width=\"" << f2(cell) << "\" height=\"" << f2(cell) << "\" fill=\""
              << ramp_color(t) << "\"/>\n";
        }
    }
    for (int k = 0; k <= 2; ++k) {
        const double off = k * 12 * cell;
        s << "<line x1=\"" << f2(x0 + off) << "\" y1=\"" << f2(y0) << "\" x2=\"" << f2(x0 + off)
          << "\" y2=\"" << f2(y0 + grid) << "\" stroke=\"white\" stroke-width=\"1.5\"/>\n";
        s << "<line x1=\"" << f2(x0) << "\" y1=\"" << f2(y0 + off) << "\" x2=\"" << f2(x0 + grid)
          << "\" y2=\"" << f2(y0 + off) << "\" stroke=\"white\" stroke-width=\"1.5\"/>\n";
    }
    for (int o = 0; o < 2; ++o) {
        const double mid = (o + 0.5) * 12 * cell;
        s << "<text x=\"" << f2(x0 + mid) << "\" y=\"" << f2(y0 + grid + 16)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">object " << o + 1
          << "</text>\n";
        s << "<text x=\"" << f2(x0 - 10) << "\" y=\"" << f2(y0 + mid)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" transform=\"rotate(-90 "
          << f2(x0 - 10) << " " << f2(y0 + mid) << ")\">object " << o + 1 << "</text>\n";
    }
    s << "<text x=\"" << f2(x0) << "\" y=\"" << f2(y0 + grid + 32)
      << "\" font-family=\"sans-serif\" font-size=\"10\">"
      << (similarity ? "cosine similarity, -1 dark to 1 bright" : "cosine distance, 0 dark to 2 bright")
      << "</text>\n";
    s << "</svg>\n";
    return s.str();
}

std::string scatter_svg(const std::string& title, const LdaProjection& proj,
                        const std::vector<int>& labels) {
    const double x0 = 50, y0 = 30, pw = 420, ph = 360;
    const double width = x0 + pw + 20, height = y0 + ph + 40;
    const int n = proj.points.shape[0];
    const int k = proj.class_means.shape[0];
    double lo[2] = {1e300, 1e300}, hi[2] = {-1e300, -1e300};
    auto widen = [&](const Tensor& t) {
        for (int i = 0; i < t.shape[0]; ++i) {
            for (int a = 0; a < 2; ++a) {
                const double v = t.v[static_cast<std::size_t>(i) * 2 + a];
                lo[a] = std::min(lo[a], v);
                hi[a] = std::max(hi[a], v);
            }
        }
    };
    widen(proj.points);
    widen(proj.class_means);
    for (int a = 0; a < 2; ++a) {
        const double pad = std::max(1e-9, 0.08 * (hi[a] - lo[a]));
        lo[a] -= pad;
        hi[a] += pad;
    }
    auto px = [&](double v) { return x0 + (v - lo[0]) / (hi[0] - lo[0]) * pw; };
    auto py = [&](double v) { return y0 + ph - (v - lo[1]) / (hi[1] - lo[1]) * ph; };

    std::map<int, int> class_row;
    for (int c = 0; c < k; ++c) class_row[proj.class_ids[static_cast<std::size_t>(c)]] = c;

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f2(width) << "\" height=\""
      << f2(height) << "\" viewBox=\"0 0 " << f2(width) << " " << f2(height) << "\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << f2(x0 + pw / 2) << "\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << title << "</text>\n";
    s << "<rect x=\"" << f2(x0) << "\" y=\"" << f2(y0) << "\" width=\"" << f2(pw)
      << "\" height=\"" << f2(ph) << "\" fill=\"none\" stroke=\"#999999\"/>\n";
    for (int i = 0; i < n; ++i) {
        const int c = class_row.at(labels[static_cast<std::size_t>(i)]);
        s << "<circle cx=\"" << f2(px(proj.points.v[static_cast<std::size_t>(i) * 2]))
          << "\" cy=\"" << f2(py(proj.points.v[static_cast<std::size_t>(i) * 2 + 1]))
          << "\" r=\"3\" fill=\"" << class_color(c, k) << "\" fill-opacity=\"0.75\"/>\n";
    }
    for (int c = 0; c < k; ++c) {
        s << "<circle cx=\"" << f2(px(proj.class_means.v[static_cast<std::size_t>(c) * 2]))
          << "\" cy=\"" << f2(py(proj.class_means.v[static_cast<std::size_t>(c) * 2 + 1]))
          << "\" r=\"6\" fill=\"" << class_color(c, k) << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
    }
    s << "<text x=\"" << f2(x0 + pw / 2) << "\" y=\"" << f2(y0 + ph + 24)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">discriminant axis 1</text>\n";
    s << "<text x=\"" << f2(x0 - 34) << "\" y=\"" << f2(y0 + ph / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" transform=\"rotate(-90 "
      << f2(x0 - 34) << " " << f2(y0 + ph / 2) << ")\">discriminant axis 2</text>\n";
    s << "</svg>\n";
    return s.str();
}

std::string rdm_csv(const Rdm& rdm, bool similarity) {
    std::ostringstream s;
    s << "cell";
    for (int j = 0; j < kConditionCells; ++j) s << ',' << cell_key(j);
    s << '\n';
    for (int i = 0; i < kConditionCells; ++i) {
        s << cell_key(i);
        for (int j = 0; j < kConditionCells; ++j) {
            const double v = similarity ? 1.0 - rdm.at(i, j) : rdm.at(i, j);
            s << ',' << g17(v);
        }
        s << '\n';
    }
    return s.str();
}

}  // namespace

ReportFiles emit_report(const std::vector<probe::EvalReport>& reports,
                        const std::vector<NamedRdm>& rdms, const std::vector<NamedLda>& ldas,
                        const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw DataError("cannot create " + out_dir.string() + ": " + ec.message());

    std::vector<probe::EvalReport> sorted = reports;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        return std::tie(a.method, a.condition, a.scheme) < std::tie(b.method, b.condition, b.scheme);
    });
    const bool have_imported = std::any_of(sorted.begin(), sorted.end(),
                                           [](const auto& r) { return r.method == "imported"; });

    ReportFiles files;
    auto emit = [&](const std::string& name, const std::string& text) {
        const std::filesystem::path p = out_dir / name;
        write_text_atomic(p, text);
        files.written.push_back(p);
    };

    {
        std::ostringstream s;
        s << "method,condition,scheme,fold,accuracy\n";
        for (const auto& r : sorted) {
            for (const std::string& row : probe::report_csv_rows(r)) s << row << '\n';
        }
        emit("accuracy_per_fold.csv", s.str());
    }

    {
        std::ostringstream s;
        s << "method,condition,scheme,n_folds,mean_accuracy,standard_error,chick_familiar,chick_novel";
        if (have_imported) s << ",supervised_vs_chick_pts";
        s << '\n';
        if (!sorted.empty()) {
            s << "chick,familiar,reference,0," << g17(kChickFamiliar) << ",0,"
              << g17(kChickFamiliar) << ',' << g17(kChickNovel);
            if (have_imported) s << ',';
            s << '\n';
            s << "chick,novel,reference,0," << g17(kChickNovel) << ",0," << g17(kChickFamiliar)
              << ',' << g17(kChickNovel);
            if (have_imported) s << ',';
            s << '\n';
        }
        for (const auto& r : sorted) {
            s << r.method << ',' << r.condition << ',' << r.scheme << ','
              << r.per_fold_accuracy.size() << ',' << g17(r.mean_accuracy) << ','
              << g17(r.standard_error) << ',' << g17(r.chick_familiar) << ','
              << g17(r.chick_novel);
            if (have_imported) {
                s << ',';
                if (r.method == "imported") {
                    s << g17(100.0 * (r.mean_accuracy - r.chick_novel));
                }
            }
            s << '\n';
        }
        emit("accuracy_summary.csv", s.str());
    }

    std::map<std::string, std::map<std::string, std::pair<double, double>>> by_scheme;
    std::map<std::string, std::map<std::string, int>> scheme_counts;
    for (const auto& r : sorted) {
        auto& cell = by_scheme[r.scheme][r.method];
        cell.first += r.mean_accuracy;
        cell.second += r.standard_error;
        scheme_counts[r.scheme][r.method]++;
    }
    for (const auto& [scheme, methods] : by_scheme) {
        std::vector<std::pair<std::string, std::pair<double, double>>> bars;
        for (const auto& [method, sums] : methods) {
            const int c = scheme_counts[scheme][method];
            bars.push_back({method, {sums.first / c, sums.second / c}});
        }
        emit("accuracy_" + scheme + ".svg", bar_chart_svg(scheme, bars));
    }

    for (const auto& named : rdms) {
        emit("rdm_" + named.name + "_dissimilarity.csv", rdm_csv(named.rdm, false));
        emit("rdm_" + named.name + "_similarity.csv", rdm_csv(named.rdm, true));
        emit("rdm_" + named.name + "_dissimilarity.svg",
             heatmap_svg("cosine distance, " + named.name, named.rdm, false));
        emit("rdm_" + named.name + "_similarity.svg",
             heatmap_svg("cosine similarity, " + named.name, named.rdm, true));
    }

    for (const auto& named : ldas) {
        if (named.proj.points.ndim() != 2 ||
            named.proj.points.shape[0] != static_cast<int>(named.labels.size())) {
            throw DataError("lda points and labels differ for " + named.name);
        }
        std::ostringstream s;
        s << "x,y,class\n";
        for (int i = 0; i < named.proj.points.shape[0]; ++i) {
            s << g17(named.proj.points.v[static_cast<std::size_t>(i) * 2]) << ','
              << g17(named.proj.points.v[static_cast<std::size_t>(i) * 2 + 1]) << ','
              << named.labels[static_cast<std::size_t>(i)] << '\n';
        }
        emit("lda_" + named.name + ".csv", s.str());
        emit("lda_" + named.name + ".svg",
             scatter_svg("discriminant projection, " + named.name, named.proj, named.labels));
    }

    return files;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<std::string> fields;
        std::string::size_type start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            if (comma == std::string::npos) {
                fields.push_back(line.substr(start));
                break;
            }
            fields.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        rows.push_back(std::move(fields));
    }
    return rows;
}

}  // namespace rearing::analysis
