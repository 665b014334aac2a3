#include "peerlex/report.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "peerlex/errors.hpp"

namespace peerlex::report {

namespace {

// Markdown placeholder for an absent value (U+2014).
constexpr std::string_view kAbsent = "\xE2\x80\x94";

std::string effect_name(stats::EffectSize e) {
  return e == stats::EffectSize::pooled ? "pooled" : "paired_dz";
}

std::string ks_level_name(KsLevel k) { return k == KsLevel::post ? "post" : "response"; }

std::string to_chars_string(double value, std::chars_format fmt, int precision) {
  char buf[512];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, fmt, precision);
  if (ec != std::errc()) return "nan";
  std::string out(buf, end);
  // "-0.000" only says the value rounded to zero.
  if (out.starts_with('-') && out.find_first_not_of("-0.e+", 0) == std::string::npos)
    out.erase(0, 1);
  return out;
}

std::string format_p(double p, int precision) {
  if (p == 0.0) return "0";
  if (p < std::pow(10.0, -precision)) return to_chars_string(p, std::chars_format::scientific, 2);
  return format_fixed(p, precision);
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string markdown_cell(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += "\\|";
    else if (c == '\n' || c == '\r') out.push_back(' ');
    else out.push_back(c);
  }
  return out;
}

std::string star_string(int n) { return std::string(static_cast<std::size_t>(n), '*'); }

// Runs body(i) for i in [0, n) on up to `workers` threads; the first
// exception is rethrown after the loop.
template <typename F>
void parallel_for(std::size_t n, int workers, F&& body) {
  std::exception_ptr failure;
  std::mutex mutex;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for num_threads(std::max(1, workers)) schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

struct MetricResult {
  ComparisonRow row;
  std::optional<double> t_p;
  std::optional<double> ks_p;
  std::vector<std::string> notes;
};

std::vector<double> human_response_values(const std::vector<MeasureRow>& rows,
                                          const std::string& metric,
                                          const std::unordered_set<std::string>& posts) {
  std::vector<double> out;
  for (const auto& r : rows) {
    if (r.source != kHumanSource || !posts.count(r.post_id)) continue;
    if (auto v = r.get(metric)) out.push_back(*v);
  }
  return out;
}

MetricResult compare_one(const std::vector<MeasureRow>& rows, const Corpus& corpus,
                         const std::string& model, const std::string& metric,
                         const Options& options) {
  MetricResult result;
  ComparisonRow& row = result.row;
  row.metric = metric;

  Pairing pairing;
  try {
    pairing = pair_by_post(corpus, rows, metric, model);
  } catch (const InputError& e) {
    result.notes.push_back(metric + ": " + e.what());
    return result;
  }
  row.n_pairs = pairing.observations.size();
  row.exclusions = pairing.excluded_posts;
  if (pairing.observations.empty()) {
    result.notes.push_back(metric + ": no paired posts");
    return result;
  }

  std::vector<double> ai;
  std::vector<double> oc;
  for (const auto& o : pairing.observations) {
    ai.push_back(o.ai_value);
    oc.push_back(o.oc_mean);
  }
  row.mean_ai = stats::mean(ai);
  row.mean_oc = stats::mean(oc);
  row.diff_pct = difference_percent(*row.mean_ai, *row.mean_oc);
  row.negative_baseline = *row.mean_oc < 0.0;
  if (row.negative_baseline)
    result.notes.push_back(metric + ": negative baseline mean, Difference % sign is unreliable");

  const auto cmp = stats::compare_metric(pairing.observations, {options.effect});
  for (const auto& note : cmp.notes) result.notes.push_back(metric + ": " + note);
  row.cohens_d = cmp.cohens_d;
  row.emphasis = cmp.cohens_d && std::fabs(*cmp.cohens_d) > kEmphasisEffect;
  if (cmp.t) {
    row.t = cmp.t->statistic;
    result.t_p = cmp.t->p_value;
  }
  if (options.ks_level == KsLevel::post) {
    if (cmp.ks) {
      row.ks_d = cmp.ks->statistic;
      result.ks_p = cmp.ks->p_value;
    }
  } else {
    std::unordered_set<std::string> paired;
    for (const auto& o : pairing.observations) paired.insert(o.post_id);
    try {
      const auto ks = stats::ks_two_sample(ai, human_response_values(rows, metric, paired));
      row.ks_d = ks.statistic;
      result.ks_p = ks.p_value;
    } catch (const stats::StatsError& e) {
      result.notes.push_back(metric + ": ks: " + e.what());
    }
  }
  return result;
}

}  // namespace

Format parse_format(std::string_view name) {
  if (name == "markdown" || name == "md") return Format::markdown;
  if (name == "csv") return Format::csv;
  throw InputError("format must be markdown or csv, got '" + std::string(name) + "'");
}

KsLevel parse_ks_level(std::string_view name) {
  if (name == "post") return KsLevel::post;
  if (name == "response") return KsLevel::response;
  throw InputError("ks level must be post or response, got '" + std::string(name) + "'");
}

stats::EffectSize parse_effect_size(std::string_view name) {
  if (name == "pooled") return stats::EffectSize::pooled;
  if (name == "paired_dz" || name == "dz") return stats::EffectSize::paired_dz;
  throw InputError("effect size must be pooled or paired_dz, got '" + std::string(name) + "'");
}

int stars(double p) {
  if (!(p >= 0.0)) return 0;
  if (p < 0.001) return 3;
  if (p < 0.01) return 2;
  if (p < 0.05) return 1;
  return 0;
}

std::optional<double> difference_percent(double mean_ai, double mean_oc) {
  if (mean_oc == 0.0 || !std::isfinite(mean_oc) || !std::isfinite(mean_ai)) return std::nullopt;
  return 100.0 * (mean_ai - mean_oc) / mean_oc;
}

std::string format_fixed(double value, int precision) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return to_chars_string(value, std::chars_format::fixed, precision);
}

std::string format_general(double value, int significant) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return to_chars_string(value, std::chars_format::general, significant);
}

ComparisonTable build_comparison_table(const std::vector<MeasureRow>& rows, const Corpus& corpus,
                                       const std::string& model,
                                       const std::vector<std::string>& family,
                                       const Options& options, const std::string& title) {
  if (family.empty()) throw InputError("comparison family is empty");
  std::vector<MetricResult> results(family.size());
  parallel_for(family.size(), options.workers, [&](std::size_t i) {
    results[i] = compare_one(rows, corpus, model, family[i], options);
  });

  ComparisonTable table;
  table.meta.title = title;
  table.meta.model = model;
  table.meta.scorer = options.scorer_label;
  table.meta.effect_size = effect_name(options.effect);
  table.meta.ks_level = ks_level_name(options.ks_level);
  table.meta.family_size = family.size();
  const double m = static_cast<double>(family.size());
  for (auto& r : results) {
    if (r.t_p) {
      r.row.t_p_adjusted = std::min(1.0, m * *r.t_p);
      r.row.stars_t = stars(*r.row.t_p_adjusted);
    }
    if (r.ks_p) {
      r.row.ks_p_adjusted = std::min(1.0, m * *r.ks_p);
      r.row.stars_ks = stars(*r.row.ks_p_adjusted);
    }
    table.meta.total_exclusions += r.row.exclusions;
    for (auto& note : r.notes) table.meta.notes.push_back(std::move(note));
    table.rows.push_back(std::move(r.row));
  }
  return table;
}

MultiModelTable build_multimodel_table(const std::vector<MeasureRow>& rows, const Corpus& corpus,
                                       const std::vector<std::string>& models,
                                       const std::vector<std::string>& family,
                                       const Options& options) {
  if (models.empty()) throw InputError("multi-model table needs at least one model besides human");
  if (family.empty()) throw InputError("comparison family is empty");
  MultiModelTable table;
  table.models = models;
  table.meta.title = "Multi-model comparison";
  table.meta.model = [&] {
    std::string joined;
    for (const auto& name : models) joined += (joined.empty() ? "" : ",") + name;
    return joined;
  }();
  table.meta.scorer = options.scorer_label;
  table.meta.effect_size = effect_name(options.effect);
  table.meta.ks_level = ks_level_name(options.ks_level);
  table.meta.family_size = family.size();
  table.rows.resize(family.size());

  std::vector<std::vector<std::string>> notes(family.size());
  parallel_for(family.size(), options.workers, [&](std::size_t i) {
    const auto& metric = family[i];
    MultiModelRow& row = table.rows[i];
    row.metric = metric;
    row.means.assign(models.size() + 1, std::nullopt);
    row.t_vs_human.assign(models.size(), std::nullopt);

    // post_id -> (human post mean, value per model)
    std::vector<std::unordered_map<std::string, PairedObservation>> by_model(models.size());
    for (std::size_t k = 0; k < models.size(); ++k) {
      Pairing pairing;
      try {
        pairing = pair_by_post(corpus, rows, metric, models[k]);
      } catch (const InputError& e) {
        notes[i].push_back(metric + ": " + e.what());
        continue;
      }
      std::vector<double> diffs;
      for (const auto& o : pairing.observations) {
        diffs.push_back(o.ai_value - o.oc_mean);
        by_model[k].emplace(o.post_id, o);
      }
      try {
        row.t_vs_human[k] = stats::paired_t(diffs);
      } catch (const stats::StatsError& e) {
        notes[i].push_back(metric + ": t vs " + models[k] + ": " + e.what());
      }
    }

    std::vector<std::vector<double>> groups(models.size() + 1);
    for (const auto& post : corpus.posts()) {
      bool everywhere = true;
      for (const auto& m : by_model) everywhere = everywhere && m.count(post.post_id);
      if (!everywhere) continue;
      groups[0].push_back(by_model[0].at(post.post_id).oc_mean);
      for (std::size_t k = 0; k < models.size(); ++k)
        groups[k + 1].push_back(by_model[k].at(post.post_id).ai_value);
    }
    row.n_common_posts = groups[0].size();
    if (row.n_common_posts == 0) {
      notes[i].push_back(metric + ": no post has a value in every modality");
      return;
    }
    for (std::size_t g = 0; g < groups.size(); ++g) row.means[g] = stats::mean(groups[g]);
    try {
      row.h = stats::kruskal_wallis(groups);
    } catch (const stats::StatsError& e) {
      if (e.kind() == stats::StatsError::Kind::degenerate) {
        // Every value tied: no difference between modalities at all.
        row.h = stats::TestResult{0.0, 1.0, row.n_common_posts * groups.size(),
                                  static_cast<double>(groups.size() - 1)};
      } else {
        notes[i].push_back(metric + ": H: " + e.what());
      }
    }
  });
  for (auto& n : notes)
    for (auto& note : n) table.meta.notes.push_back(std::move(note));
  return table;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

struct Cells {
  std::string mean_ai, mean_oc, diff_pct, cohens_d, t, t_p, ks_d, ks_p;
};

Cells comparison_cells(const ComparisonRow& row, int precision) {
  const auto fixed = [&](const std::optional<double>& v, int digits) {
    return v ? format_fixed(*v, digits) : std::string();
  };
  const auto p = [&](const std::optional<double>& v) {
    return v ? format_p(*v, precision) : std::string();
  };
  return {fixed(row.mean_ai, precision), fixed(row.mean_oc, precision), fixed(row.diff_pct, 2),
          fixed(row.cohens_d, precision), fixed(row.t, precision),     p(row.t_p_adjusted),
          fixed(row.ks_d, precision),     p(row.ks_p_adjusted)};
}

std::string or_absent(const std::string& s) { return s.empty() ? std::string(kAbsent) : s; }

}  // namespace

std::string render(const ComparisonTable& table, Format format, int precision) {
  std::string out;
  if (format == Format::csv) {
    out = "metric,mean_ai,mean_oc,diff_pct,cohens_d,t,t_p_adj,stars_t,ks_d,ks_p_adj,stars_ks,"
          "n_pairs,exclusions\n";
    for (const auto& row : table.rows) {
      const auto c = comparison_cells(row, precision);
      out += csv_field(row.metric) + ',' + c.mean_ai + ',' + c.mean_oc + ',' + c.diff_pct + ',' +
             c.cohens_d + ',' + c.t + ',' + c.t_p + ',' + std::to_string(row.stars_t) + ',' +
             c.ks_d + ',' + c.ks_p + ',' + std::to_string(row.stars_ks) + ',' +
             std::to_string(row.n_pairs) + ',' + std::to_string(row.exclusions) + '\n';
    }
    return out;
  }
  out = "| Metric | Mean AI | Mean OC | Difference % | Cohen's d | t | p (adj.) | KS D | "
        "KS p (adj.) | Pairs | Excluded |\n"
        "|---|---:|---:|---:|---:|---:|---:|---:|---:|---:|---:|\n";
  for (const auto& row : table.rows) {
    const auto c = comparison_cells(row, precision);
    std::string diff = or_absent(c.diff_pct);
    if (row.negative_baseline && !c.diff_pct.empty()) diff += " (!)";
    std::string d = or_absent(c.cohens_d);
    if (row.emphasis) d = "**" + d + "**";
    const std::string t = c.t.empty() ? std::string(kAbsent) : c.t + star_string(row.stars_t);
    const std::string ks = c.ks_d.empty() ? std::string(kAbsent) : c.ks_d + star_string(row.stars_ks);
    out += "| " + markdown_cell(row.metric) + " | " + or_absent(c.mean_ai) + " | " +
           or_absent(c.mean_oc) + " | " + diff + " | " + d + " | " + t + " | " + or_absent(c.t_p) +
           " | " + ks + " | " + or_absent(c.ks_p) + " | " + std::to_string(row.n_pairs) + " | " +
           std::to_string(row.exclusions) + " |\n";
  }
  return out;
}

std::string render(const MultiModelTable& table, Format format, int precision) {
  const auto fixed = [&](const std::optional<double>& v) {
    return v ? format_fixed(*v, precision) : std::string();
  };
  std::string out;
  if (format == Format::csv) {
    out = "metric,mean_human";
    for (const auto& m : table.models) out += ",mean_" + csv_field(m);
    for (const auto& m : table.models)
      out += ",t_" + csv_field(m) + ",t_p_" + csv_field(m) + ",stars_t_" + csv_field(m);
    out += ",h,h_p,stars_h,n_common_posts\n";
    for (const auto& row : table.rows) {
      out += csv_field(row.metric);
      for (const auto& mean : row.means) out += ',' + fixed(mean);
      for (const auto& t : row.t_vs_human) {
        if (t)
          out += ',' + format_fixed(t->statistic, precision) + ',' + format_p(t->p_value, precision) +
                 ',' + std::to_string(stars(t->p_value));
        else
          out += ",,,0";
      }
      if (row.h)
        out += ',' + format_fixed(row.h->statistic, precision) + ',' +
               format_p(row.h->p_value, precision) + ',' + std::to_string(stars(row.h->p_value));
      else
        out += ",,,0";
      out += ',' + std::to_string(row.n_common_posts) + '\n';
    }
    return out;
  }
  out = "| Metric | Human |";
  std::string rule = "|---|---:|";
  for (const auto& m : table.models) {
    out += " " + markdown_cell(m) + " | t (" + markdown_cell(m) + ") |";
    rule += "---:|---:|";
  }
  out += " H | Posts |\n" + rule + "---:|---:|\n";
  for (const auto& row : table.rows) {
    out += "| " + markdown_cell(row.metric) + " | " + or_absent(fixed(row.means[0])) + " |";
    for (std::size_t k = 0; k < table.models.size(); ++k) {
      const auto& t = row.t_vs_human[k];
      out += " " + or_absent(fixed(row.means[k + 1])) + " | " +
             (t ? format_fixed(t->statistic, precision) + star_string(stars(t->p_value))
                : std::string(kAbsent)) +
             " |";
    }
    out += " " +
           (row.h ? format_fixed(row.h->statistic, precision) + star_string(stars(row.h->p_value))
                  : std::string(kAbsent)) +
           " | " + std::to_string(row.n_common_posts) + " |\n";
  }
  return out;
}

std::string render_metadata(const Metadata& meta, Format format) {
  const std::vector<std::pair<std::string, std::string>> fields = {
      {"title", meta.title},
      {"model", meta.model},
      {"scorer", meta.scorer},
      {"effect_size", meta.effect_size},
      {"ks_level", meta.ks_level},
      {"bonferroni_family_size", std::to_string(meta.family_size)},
      {"total_exclusions", std::to_string(meta.total_exclusions)},
  };
  std::string out;
  if (format == Format::csv) {
    out = "key,value\n";
    for (const auto& [k, v] : fields) out += k + ',' + csv_field(v) + '\n';
    for (const auto& note : meta.notes) out += "note," + csv_field(note) + '\n';
    return out;
  }
  if (!meta.title.empty()) out += "## " + meta.title + "\n\n";
  for (const auto& [k, v] : fields)
    if (k != "title") out += "- " + k + ": " + v + "\n";
  out += "- stars: * p<0.05, ** p<0.01, *** p<0.001 (Bonferroni-adjusted)\n";
  out += "- bold d: |d| > " + format_fixed(kEmphasisEffect, 2) + "\n";
  for (const auto& note : meta.notes) out += "- note: " + note + "\n";
  return out;
}

std::string distribution_csv(const std::vector<MeasureRow>& rows,
                             const std::vector<std::string>& metrics, std::size_t bins,
                             int precision) {
  if (bins == 0) throw InputError("histogram needs at least one bin");
  std::string out = "metric,source,bin,lower,upper,count\n";
  for (const auto& metric : metrics) {
    std::map<std::string, std::vector<double>> by_source;
    double lo = INFINITY;
    double hi = -INFINITY;
    for (const auto& r : rows) {
      if (auto v = r.get(metric)) {
        by_source[r.source].push_back(*v);
        lo = std::min(lo, *v);
        hi = std::max(hi, *v);
      }
    }
    if (by_source.empty()) continue;
    const double width = (hi - lo) / static_cast<double>(bins);
    for (const auto& [source, values] : by_source) {
      std::vector<std::size_t> counts(bins, 0);
      for (double v : values) {
        std::size_t b = width > 0.0 ? static_cast<std::size_t>((v - lo) / width) : 0;
        counts[std::min(b, bins - 1)]++;
      }
      for (std::size_t b = 0; b < bins; ++b) {
        const double lower = lo + width * static_cast<double>(b);
        const double upper = b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1);
        out += csv_field(metric) + ',' + csv_field(source) + ',' + std::to_string(b) + ',' +
               format_fixed(lower, precision) + ',' + format_fixed(upper, precision) + ',' +
               std::to_string(counts[b]) + '\n';
      }
    }
  }
  return out;
}

}  // namespace peerlex::report
