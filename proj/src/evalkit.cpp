#include "reworkbench/evalkit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <format>
#include <sstream>

#include "embedded_baselines.h"
#include "reworkbench/errors.hpp"

namespace reworkbench {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

double pct(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

std::string fmt2(double v) { return std::format("{:.2f}", v); }

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            lines.push_back(text.substr(pos));
            break;
        }
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(pos)));
            break;
        }
        out.push_back(trim(line.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return out;
}

double parse_double(std::string_view token, std::size_t line) {
    try {
        return std::stod(std::string(token));
    } catch (const std::exception&) {
        throw ParseError("expected number, got '" + std::string(token) + "'", line);
    }
}

PredictionSet parse_predictions_impl(std::string_view text,
                                     const std::set<std::uint64_t>* dataset_ids) {
    PredictionSet out;
    for (const auto raw : split_lines(text)) {
        const std::string_view line = trim(raw);
        if (line.empty()) continue;
        const std::size_t hash = line.find('#');
        bool matched = false;
        if (hash != std::string_view::npos && hash > 0) {
            const std::string_view id_part = trim(line.substr(0, hash));
            std::uint64_t id = 0;
            const auto* first = id_part.data();
            const auto* last = id_part.data() + id_part.size();
            auto [ptr, ec] = std::from_chars(first, last, id);
            if (!id_part.empty() && ec == std::errc{} && ptr == last) {
                if (dataset_ids != nullptr && !dataset_ids->contains(id)) {
                    // Foreign id: syntactically fine but not scoreable.
                } else if (out.entries.contains(id)) {
                    out.duplicate_count += 1;
                    matched = true;  // first occurrence wins, duplicate logged
                } else {
                    out.entries.emplace(id, std::string(trim(line.substr(hash + 1))));
                    matched = true;
                }
            }
        }
        if (!matched) out.unparsed_lines.emplace_back(line);
    }
    return out;
}

}  // namespace

PredictionSet parse_predictions(std::string_view text) {
    return parse_predictions_impl(text, nullptr);
}

PredictionSet parse_predictions(std::string_view text,
                                const std::set<std::uint64_t>& dataset_ids) {
    return parse_predictions_impl(text, &dataset_ids);
}

ConfusionMatrix score(const LabeledDataset& ds, const PredictionSet& preds) {
    ConfusionMatrix cm;
    for (const auto& lv : ds.items) {
        const bool positive = preds.entries.contains(lv.id);
        const bool rework = lv.label == Label::Rework;
        if (positive && rework) ++cm.tp;
        else if (positive && !rework) ++cm.fp;
        else if (!positive && rework) ++cm.fn;
        else ++cm.tn;
    }
    return cm;
}

MetricsRow metrics(const ConfusionMatrix& cm) {
    MetricsRow row;
    row.cm = cm;
    row.precision = pct(cm.tp, cm.tp + cm.fp);
    row.recall = pct(cm.tp, cm.tp + cm.fn);
    row.accuracy = pct(cm.tp + cm.tn, cm.total());
    row.f1 = pct(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn);
    row.fdr = pct(cm.fp, cm.fp + cm.tp);
    return row;
}

CellAverage aggregate(const std::vector<MetricsRow>& rows) {
    if (rows.empty()) throw ConfigError("cannot aggregate zero runs");
    CellAverage cell;
    cell.distribution = rows.front().distribution;
    cell.prompt_mode = rows.front().prompt_mode;
    for (const auto& r : rows) {
        if (r.distribution != cell.distribution || r.prompt_mode != cell.prompt_mode) {
            throw ConfigError("aggregate expects rows from one (distribution, mode) cell");
        }
        cell.precision += r.precision;
        cell.recall += r.recall;
        cell.f1 += r.f1;
        cell.accuracy += r.accuracy;
        cell.fdr += r.fdr;
    }
    const double n = static_cast<double>(rows.size());
    cell.precision /= n;
    cell.recall /= n;
    cell.f1 /= n;
    cell.accuracy /= n;
    cell.fdr /= n;
    cell.runs = rows.size();
    return cell;
}

std::string_view baselines_csv_text() { return embedded::kBaselinesCsv; }

std::vector<BaselineRow> parse_baselines_csv(std::string_view text) {
    std::vector<BaselineRow> out;
    const auto lines = split_lines(text);
    if (lines.empty() || trim(lines.front()) != "method,accuracy,fdr") {
        throw ParseError("expected header 'method,accuracy,fdr'", 1);
    }
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string_view line = trim(lines[i]);
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 3) {
            throw ParseError("expected 3 columns, got " + std::to_string(fields.size()), i + 1);
        }
        out.push_back(BaselineRow{std::string(fields[0]), parse_double(fields[1], i + 1),
                                  parse_double(fields[2], i + 1)});
    }
    return out;
}

const std::vector<BaselineRow>& builtin_baselines() {
    static const std::vector<BaselineRow> rows = parse_baselines_csv(baselines_csv_text());
    return rows;
}

Report render_report(const std::vector<MetricsRow>& rows,
                     const std::vector<CellAverage>& cells,
                     const std::vector<BaselineRow>& baselines,
                     const std::string& method_label) {
    std::ostringstream md;
    md << "# Rework anomaly detection report\n\n";

    if (!rows.empty()) {
        md << "## Per-run results\n\n";
        md << "| Distribution | Prompt | Run | Status | TP | TN | FP | FN | Precision % | "
              "Recall % | F1 % | Accuracy % | FDR % |\n";
        md << "|---|---|---|---|---|---|---|---|---|---|---|---|---|\n";
        for (const auto& r : rows) {
            md << "| " << r.distribution << " | " << r.prompt_mode << " | " << r.run_index + 1
               << " | " << r.status << " | " << r.cm.tp << " | " << r.cm.tn << " | " << r.cm.fp
               << " | " << r.cm.fn << " | " << fmt2(r.precision) << " | " << fmt2(r.recall)
               << " | " << fmt2(r.f1) << " | " << fmt2(r.accuracy) << " | " << fmt2(r.fdr)
               << " |\n";
        }
        md << "\n";
    }

    if (!cells.empty()) {
        md << "## Cell averages\n\n";
        md << "| Distribution | Prompt | Runs | Avg Precision % | Avg Recall % | Avg F1 % | "
              "Avg Accuracy % | Avg FDR % |\n";
        md << "|---|---|---|---|---|---|---|---|\n";
        for (const auto& c : cells) {
            md << "| " << c.distribution << " | " << c.prompt_mode << " | " << c.runs << " | "
               << fmt2(c.precision) << " | " << fmt2(c.recall) << " | " << fmt2(c.f1) << " | "
               << fmt2(c.accuracy) << " | " << fmt2(c.fdr) << " |\n";
        }
        md << "\n";
    }

    // Comparison table: reference methods plus this harness's best cell per
    // distribution (by average accuracy).
    struct CompareRow {
        std::string method;
        double accuracy;
        double fdr;
    };
    std::vector<CompareRow> compare;
    for (const auto& b : baselines) compare.push_back({b.method, b.accuracy, b.fdr});
    std::vector<std::string> dists;
    for (const auto& c : cells) {
        if (std::find(dists.begin(), dists.end(), c.distribution) == dists.end()) {
            dists.push_back(c.distribution);
        }
    }
    for (const auto& dist : dists) {
        const CellAverage* best = nullptr;
        for (const auto& c : cells) {
            if (c.distribution == dist && (best == nullptr || c.accuracy > best->accuracy)) {
                best = &c;
            }
        }
        if (best != nullptr) {
            compare.push_back(
                {method_label + " - " + dist + " (" + best->prompt_mode + "-shot)",
                 best->accuracy, best->fdr});
        }
    }

    std::size_t best_acc = 0, best_fdr = 0;
    for (std::size_t i = 1; i < compare.size(); ++i) {
        if (compare[i].accuracy > compare[best_acc].accuracy) best_acc = i;
        if (compare[i].fdr < compare[best_fdr].fdr) best_fdr = i;
    }

    std::string csv = "method,accuracy,fdr,flags\n";
    if (!compare.empty()) {
        md << "## Comparison with reference methods\n\n";
        md << "| Method | Accuracy % | FDR % |\n|---|---|---|\n";
        for (std::size_t i = 0; i < compare.size(); ++i) {
            const auto& r = compare[i];
            const std::string acc =
                i == best_acc ? "**" + fmt2(r.accuracy) + "**" : fmt2(r.accuracy);
            const std::string fdr = i == best_fdr ? "**" + fmt2(r.fdr) + "**" : fmt2(r.fdr);
            md << "| " << r.method << " | " << acc << " | " << fdr << " |\n";

            std::string flags;
            if (i == best_acc) flags += "best_accuracy";
            if (i == best_fdr) flags += flags.empty() ? "best_fdr" : ";best_fdr";
            csv += r.method + "," + fmt2(r.accuracy) + "," + fmt2(r.fdr) + "," + flags + "\n";
        }
        md << "\nBest accuracy and lowest false discovery rate are shown in bold.\n";
    }

    return Report{md.str(), csv};
}

std::string to_metrics_csv(const std::vector<MetricsRow>& rows) {
    std::string out =
        "distribution,prompt,run,status,tp,tn,fp,fn,precision,recall,f1,accuracy,fdr\n";
    for (const auto& r : rows) {
        out += r.distribution + "," + r.prompt_mode + "," + std::to_string(r.run_index) + "," +
               r.status + "," + std::to_string(r.cm.tp) + "," + std::to_string(r.cm.tn) + "," +
               std::to_string(r.cm.fp) + "," + std::to_string(r.cm.fn) + "," +
               std::format("{:.6f}", r.precision) + "," + std::format("{:.6f}", r.recall) +
               "," + std::format("{:.6f}", r.f1) + "," + std::format("{:.6f}", r.accuracy) +
               "," + std::format("{:.6f}", r.fdr) + "\n";
    }
    return out;
}

std::vector<MetricsRow> parse_metrics_csv(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty() ||
        trim(lines.front()) !=
            "distribution,prompt,run,status,tp,tn,fp,fn,precision,recall,f1,accuracy,fdr") {
        throw ParseError("unexpected metrics.csv header", 1);
    }
    std::vector<MetricsRow> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string_view line = trim(lines[i]);
        if (line.empty()) continue;
        const auto f = split_fields(line);
        if (f.size() != 13) {
            throw ParseError("expected 13 columns, got " + std::to_string(f.size()), i + 1);
        }
        MetricsRow r;
        r.distribution = std::string(f[0]);
        r.prompt_mode = std::string(f[1]);
        r.run_index = static_cast<int>(parse_double(f[2], i + 1));
        r.status = std::string(f[3]);
        r.cm.tp = static_cast<std::size_t>(parse_double(f[4], i + 1));
        r.cm.tn = static_cast<std::size_t>(parse_double(f[5], i + 1));
        r.cm.fp = static_cast<std::size_t>(parse_double(f[6], i + 1));
        r.cm.fn = static_cast<std::size_t>(parse_double(f[7], i + 1));
        r.precision = parse_double(f[8], i + 1);
        r.recall = parse_double(f[9], i + 1);
        r.f1 = parse_double(f[10], i + 1);
        r.accuracy = parse_double(f[11], i + 1);
        r.fdr = parse_double(f[12], i + 1);
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace reworkbench
