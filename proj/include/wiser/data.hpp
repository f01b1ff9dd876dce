// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wiser/errors.hpp"
#include "wiser/rng.hpp"
#include "wiser/tensor.hpp"

namespace wiser::data {

enum class Domain { CellLine, Patient };

inline const char* domain_name(Domain d) { return d == Domain::CellLine ? "cell-line" : "patient"; }

/// Per-sample gene-expression vectors with a domain tag.
struct ExpressionMatrix {
    std::size_t samples = 0;
    std::size_t genes = 0;
    std::vector<double> values; // samples x genes, row-major
    Domain domain = Domain::CellLine;
    std::vector<std::string> sample_ids;
    std::vector<std::string> gene_names;

    double at(std::size_t s, std::size_t g) const { return values[s * genes + g]; }
    double& at(std::size_t s, std::size_t g) { return values[s * genes + g]; }

    Tensor row_tensor(std::size_t s) const {
        Tensor t(1, genes);
        std::copy_n(values.begin() + long(s * genes), genes, t.data.begin());
        return t;
    }

    Tensor as_tensor() const { return Tensor({samples, genes}, values); }

    Tensor gather_rows(const std::vector<std::size_t>& idx) const {
        Tensor t(idx.size(), genes);
        for (std::size_t i = 0; i < idx.size(); ++i)
            std::copy_n(values.begin() + long(idx[i] * genes), genes,
                        t.data.begin() + long(i * genes));
        return t;
    }
};

/// Tri-state {-1, 0, 1} drug-response labels per (sample, drug).
struct ResponseMatrix {
    std::size_t samples = 0;
    std::vector<std::string> drugs;
    std::vector<int> labels; // samples x drugs
    std::vector<std::string> sample_ids;

    int at(std::size_t s, std::size_t d) const { return labels[s * drugs.size() + d]; }
    int& at(std::size_t s, std::size_t d) { return labels[s * drugs.size() + d]; }

    std::vector<int> drug_column(std::size_t d) const {
        std::vector<int> col(samples);
        for (std::size_t s = 0; s < samples; ++s) col[s] = at(s, d);
        return col;
    }
};

/// Real-valued per-(sample, drug) scores with NaN as the missing marker.
/// Input to the AUDRC / relapse labelers.
struct ScoreTable {
    std::size_t samples = 0;
    std::vector<std::string> drugs;
    std::vector<double> values; // samples x drugs, NaN = missing
    std::vector<std::string> sample_ids;

    double at(std::size_t s, std::size_t d) const { return values[s * drugs.size() + d]; }
    double& at(std::size_t s, std::size_t d) { return values[s * drugs.size() + d]; }
};

struct FoldSplit {
    std::size_t k = 0;
    std::vector<std::size_t> assignments; // per-sample fold index in [0, k)

    std::vector<std::size_t> fold_indices(std::size_t fold) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < assignments.size(); ++i)
            if (assignments[i] == fold) out.push_back(i);
        return out;
    }

    std::vector<std::size_t> complement_indices(std::size_t fold) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < assignments.size(); ++i)
            if (assignments[i] != fold) out.push_back(i);
        return out;
    }
};

struct SynthConfig {
    std::size_t latent_dim = 8;
    std::size_t genes = 100;
    std::size_t n_cell = 300;
    std::size_t n_patient = 1500;
    std::size_t n_drugs = 4;
    double domain_shift_scale = 0.3;
    double noise_scale = 0.05;
    std::uint64_t seed = 1;

    void validate() const {
        if (latent_dim == 0 || genes == 0 || n_cell == 0 || n_patient == 0 || n_drugs == 0)
            throw ConfigError("synth: all counts must be positive");
        if (domain_shift_scale < 0.0 || noise_scale < 0.0)
            throw ConfigError("synth: scales must be nonnegative");
    }
};

// ---- TSV I/O -----------------------------------------------------------
//
// Expression TSV: first row = tab-separated gene names; each further row
// is sample_id TAB value TAB value ... Response/score TSV: first row =
// drug names; rows = sample_id then labels/scores; "NA" = missing.

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find('\t', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

inline double parse_double(std::string_view token, const std::string& path, std::size_t line_no) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": bad number '" +
                         std::string(token) + "'");
    }
    return v;
}

/// Shortest round-trippable decimal form of a double.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    // prefer the shorter form when it round-trips exactly
    for (int prec = 1; prec < 17; ++prec) {
        char probe[32];
        std::snprintf(probe, sizeof probe, "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(probe, "%lf", &back);
        if (back == v) return probe;
    }
    return buf;
}

struct RawTable {
    std::vector<std::string> columns;
    std::vector<std::string> sample_ids;
    std::vector<std::vector<std::string>> cells;
};

inline RawTable read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    RawTable t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_tabs(line);
        if (line_no == 1) {
            for (auto f : fields) t.columns.emplace_back(f);
            continue;
        }
        if (fields.size() != t.columns.size() + 1) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(t.columns.size() + 1) + " fields, got " +
                             std::to_string(fields.size()));
        }
        t.sample_ids.emplace_back(fields[0]);
        std::vector<std::string> row;
        row.reserve(fields.size() - 1);
        for (std::size_t i = 1; i < fields.size(); ++i) row.emplace_back(fields[i]);
        t.cells.push_back(std::move(row));
    }
    if (t.columns.empty()) throw ParseError(path + ": empty file");
    return t;
}

inline void check_unique_ids(const std::vector<std::string>& ids, const std::string& path) {
    std::vector<std::string> sorted = ids;
    std::sort(sorted.begin(), sorted.end());
    const auto dup = std::adjacent_find(sorted.begin(), sorted.end());
    if (dup != sorted.end()) throw DataError(path + ": duplicate sample id '" + *dup + "'");
}

} // namespace detail

inline ExpressionMatrix load_expression(const std::string& path, Domain domain) {
    const auto raw = detail::read_table(path);
    if (raw.sample_ids.empty()) throw DataError(path + ": zero samples");
    ExpressionMatrix m;
    m.domain = domain;
    m.gene_names = raw.columns;
    m.sample_ids = raw.sample_ids;
    m.samples = raw.sample_ids.size();
    m.genes = raw.columns.size();
    m.values.resize(m.samples * m.genes);
    for (std::size_t s = 0; s < m.samples; ++s) {
        for (std::size_t g = 0; g < m.genes; ++g) {
            const double v = detail::parse_double(raw.cells[s][g], path, s + 2);
            if (!std::isfinite(v)) {
                throw DataError(path + ":" + std::to_string(s + 2) + ": non-finite value in gene " +
                                m.gene_names[g]);
            }
            m.at(s, g) = v;
        }
    }
    detail::check_unique_ids(m.sample_ids, path);
    return m;
}

inline void save_expression(const std::string& path, const ExpressionMatrix& m) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot write");
    for (std::size_t g = 0; g < m.genes; ++g) {
        if (g) out << '\t';
        out << (g < m.gene_names.size() ? m.gene_names[g] : "g" + std::to_string(g));
    }
    out << '\n';
    for (std::size_t s = 0; s < m.samples; ++s) {
        out << m.sample_ids[s];
        for (std::size_t g = 0; g < m.genes; ++g) out << '\t' << detail::format_double(m.at(s, g));
        out << '\n';
    }
}

inline ScoreTable load_score_table(const std::string& path) {
    const auto raw = detail::read_table(path);
    if (raw.sample_ids.empty()) throw DataError(path + ": zero samples");
    ScoreTable t;
    t.drugs = raw.columns;
    t.sample_ids = raw.sample_ids;
    t.samples = raw.sample_ids.size();
    t.values.resize(t.samples * t.drugs.size());
    for (std::size_t s = 0; s < t.samples; ++s) {
        for (std::size_t d = 0; d < t.drugs.size(); ++d) {
            const std::string& cell = raw.cells[s][d];
            t.at(s, d) = cell == "NA" ? std::numeric_limits<double>::quiet_NaN()
                                      : detail::parse_double(cell, path, s + 2);
        }
    }
    detail::check_unique_ids(t.sample_ids, path);
    return t;
}

inline ResponseMatrix load_response(const std::string& path) {
    const auto raw = detail::read_table(path);
    if (raw.sample_ids.empty()) throw DataError(path + ": zero samples");
    ResponseMatrix m;
    m.drugs = raw.columns;
    m.sample_ids = raw.sample_ids;
    m.samples = raw.sample_ids.size();
    if (m.drugs.empty()) throw DataError(path + ": no drug columns");
    m.labels.resize(m.samples * m.drugs.size());
    for (std::size_t s = 0; s < m.samples; ++s) {
        for (std::size_t d = 0; d < m.drugs.size(); ++d) {
            const std::string& cell = raw.cells[s][d];
            int v = -1;
            if (cell != "NA") {
                const double x = detail::parse_double(cell, path, s + 2);
                v = int(x);
                if (double(v) != x || (v != -1 && v != 0 && v != 1)) {
                    throw DataError(path + ":" + std::to_string(s + 2) + ": label '" + cell +
                                    "' not in {-1, 0, 1}");
                }
            }
            m.at(s, d) = v;
        }
    }
    detail::check_unique_ids(m.sample_ids, path);
    return m;
}

inline void save_response(const std::string& path, const ResponseMatrix& m) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot write");
    for (std::size_t d = 0; d < m.drugs.size(); ++d) {
        if (d) out << '\t';
        out << m.drugs[d];
    }
    out << '\n';
    for (std::size_t s = 0; s < m.samples; ++s) {
        out << m.sample_ids[s];
        for (std::size_t d = 0; d < m.drugs.size(); ++d) out << '\t' << m.at(s, d);
        out << '\n';
    }
}

// ---- Labelers ----------------------------------------------------------

/// Per-drug z-score labeling of AUDRC scores: z < 0 -> responder (1),
/// z > 0 -> non-responder (0), z == 0 -> 0, missing -> -1.
inline ResponseMatrix audrc_to_labels(const ScoreTable& scores) {
    ResponseMatrix m;
    m.samples = scores.samples;
    m.drugs = scores.drugs;
    m.sample_ids = scores.sample_ids;
    m.labels.assign(m.samples * m.drugs.size(), -1);
    for (std::size_t d = 0; d < m.drugs.size(); ++d) {
        double sum = 0.0, sumsq = 0.0;
        std::size_t n = 0;
        for (std::size_t s = 0; s < m.samples; ++s) {
            const double v = scores.at(s, d);
            if (std::isnan(v)) continue;
            sum += v;
            sumsq += v * v;
            ++n;
        }
        if (n < 2) throw DataError("audrc_to_labels: drug " + m.drugs[d] + " has " +
                                   std::to_string(n) + " observed scores (need >= 2)");
        const double mean = sum / double(n);
        const double var = sumsq / double(n) - mean * mean;
        const double sd = std::sqrt(std::max(var, 0.0));
        if (sd == 0.0) throw DataError("audrc_to_labels: drug " + m.drugs[d] + " has constant scores");
        for (std::size_t s = 0; s < m.samples; ++s) {
            const double v = scores.at(s, d);
            if (std::isnan(v)) continue;
            const double z = (v - mean) / sd;
            m.at(s, d) = z < 0.0 ? 1 : 0;
        }
    }
    return m;
}

inline double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Per-drug median labeling of relapse times: value > median -> 1,
/// otherwise 0 (ties included), missing -> -1.
inline ResponseMatrix relapse_to_labels(const ScoreTable& times) {
    ResponseMatrix m;
    m.samples = times.samples;
    m.drugs = times.drugs;
    m.sample_ids = times.sample_ids;
    m.labels.assign(m.samples * m.drugs.size(), -1);
    for (std::size_t d = 0; d < m.drugs.size(); ++d) {
        std::vector<double> observed;
        for (std::size_t s = 0; s < m.samples; ++s) {
            const double v = times.at(s, d);
            if (!std::isnan(v)) observed.push_back(v);
        }
        if (observed.empty())
            throw DataError("relapse_to_labels: drug " + m.drugs[d] + " has no observed values");
        const double med = median_of(observed);
        for (std::size_t s = 0; s < m.samples; ++s) {
            const double v = times.at(s, d);
            if (std::isnan(v)) continue;
            m.at(s, d) = v > med ? 1 : 0;
        }
    }
    return m;
}

// ---- Splits --------------------------------------------------------------

/// Stratified k-fold assignment over a binary label vector. Per fold,
/// each class count is within one of its proportional share.
inline FoldSplit stratified_kfold(const std::vector<int>& labels, std::size_t k,
                                  std::uint64_t seed) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == 1)
            pos.push_back(i);
        else if (labels[i] == 0)
            neg.push_back(i);
        else
            throw ConfigError("stratified_kfold: labels must be binary, got " +
                              std::to_string(labels[i]) + " at index " + std::to_string(i));
    }
    if (pos.empty() || neg.empty()) throw ConfigError("stratified_kfold: both classes required");
    if (k == 0) throw ConfigError("stratified_kfold: k must be positive");
    if (k > std::min(pos.size(), neg.size())) {
        throw ConfigError("stratified_kfold: k=" + std::to_string(k) +
                          " exceeds minority class count " +
                          std::to_string(std::min(pos.size(), neg.size())));
    }
    Rng rng(derive_seed(seed, {0x5f01d5ULL, k}));
    rng.shuffle(pos);
    rng.shuffle(neg);
    FoldSplit split;
    split.k = k;
    split.assignments.assign(labels.size(), 0);
    for (std::size_t i = 0; i < pos.size(); ++i) split.assignments[pos[i]] = i % k;
    for (std::size_t i = 0; i < neg.size(); ++i) split.assignments[neg[i]] = i % k;
    return split;
}

/// Partitions [0, sample_count) into O disjoint chunks whose sizes differ
/// by at most one.
inline std::vector<std::vector<std::size_t>> chunk_partition(std::size_t sample_count,
                                                             std::size_t n_chunks,
                                                             std::uint64_t seed) {
    if (n_chunks == 0) throw ConfigError("chunk_partition: chunk count must be positive");
    if (n_chunks > sample_count) {
        throw ConfigError("chunk_partition: " + std::to_string(n_chunks) + " chunks for " +
                          std::to_string(sample_count) + " samples");
    }
    Rng rng(derive_seed(seed, {0xc40c4ULL, n_chunks}));
    const std::vector<std::size_t> order = rng.permutation(sample_count);
    std::vector<std::vector<std::size_t>> chunks(n_chunks);
    for (std::size_t i = 0; i < sample_count; ++i) chunks[i % n_chunks].push_back(order[i]);
    for (auto& c : chunks) std::sort(c.begin(), c.end());
    return chunks;
}

// ---- Synthetic two-domain generator -------------------------------------

struct SynthData {
    ExpressionMatrix cell;
    ExpressionMatrix patient;
    ResponseMatrix cell_response;
    ResponseMatrix patient_truth;
    // latent factors are kept for generation-time diagnostics
    Tensor cell_latent;
    Tensor patient_latent;
};

/// Draws both domains from a shared latent mechanism: expression is a
/// fixed linear read-out of latent factors, drug labels are per-drug
/// linear scores thresholded at their in-domain median, and the patient
/// domain additionally passes through an affine shift plus noise.
inline SynthData synth_generate(const SynthConfig& cfg) {
    cfg.validate();
    SynthData out;
    Rng map_rng(derive_seed(cfg.seed, {1}));
    Rng cell_rng(derive_seed(cfg.seed, {2}));
    Rng pat_rng(derive_seed(cfg.seed, {3}));

    const std::size_t k = cfg.latent_dim, g = cfg.genes, n = cfg.n_drugs;

    // latent -> expression read-out
    Tensor readout(k, g);
    for (double& v : readout.data) v = map_rng.normal() / std::sqrt(double(k));

    // per-drug scoring directions, unit norm
    Tensor drug_dirs(n, k);
    for (std::size_t d = 0; d < n; ++d) {
        double norm = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            drug_dirs.at(d, j) = map_rng.normal();
            norm += drug_dirs.at(d, j) * drug_dirs.at(d, j);
        }
        norm = std::sqrt(norm);
        for (std::size_t j = 0; j < k; ++j) drug_dirs.at(d, j) /= norm;
    }

    // patient-only affine shift: X -> X (I + s*G/sqrt(g)) + s*b
    Tensor shift_mat(g, g);
    Tensor shift_off(1, g);
    for (std::size_t i = 0; i < g; ++i) {
        for (std::size_t j = 0; j < g; ++j) {
            shift_mat.at(i, j) = (i == j ? 1.0 : 0.0) +
                                 cfg.domain_shift_scale * map_rng.normal() / std::sqrt(double(g));
        }
    }
    for (double& v : shift_off.data) v = cfg.domain_shift_scale * map_rng.normal();

    auto sample_domain = [&](std::size_t count, Rng& rng, bool shifted, Domain domain,
                             const std::string& prefix, ExpressionMatrix& expr, Tensor& latent) {
        latent = Tensor(count, k);
        for (double& v : latent.data) v = rng.normal();
        Tensor x = wiser::matmul(latent, readout);
        if (shifted) {
            x = wiser::matmul(x, shift_mat);
            for (std::size_t s = 0; s < count; ++s)
                for (std::size_t j = 0; j < g; ++j) x.at(s, j) += shift_off.at(0, j);
        }
        for (double& v : x.data) v += cfg.noise_scale * rng.normal();
        expr.samples = count;
        expr.genes = g;
        expr.values = std::move(x.data);
        expr.domain = domain;
        expr.sample_ids.reserve(count);
        for (std::size_t s = 0; s < count; ++s)
            expr.sample_ids.push_back(prefix + std::to_string(s + 1));
        expr.gene_names.reserve(g);
        for (std::size_t j = 0; j < g; ++j) expr.gene_names.push_back("g" + std::to_string(j + 1));
    };

    sample_domain(cfg.n_cell, cell_rng, false, Domain::CellLine, "cell_", out.cell, out.cell_latent);
    sample_domain(cfg.n_patient, pat_rng, cfg.domain_shift_scale > 0.0, Domain::Patient, "pat_",
                  out.patient, out.patient_latent);

    auto label_domain = [&](const Tensor& latent, const ExpressionMatrix& expr) {
        ResponseMatrix resp;
        resp.samples = expr.samples;
        resp.sample_ids = expr.sample_ids;
        resp.drugs.reserve(n);
        for (std::size_t d = 0; d < n; ++d) resp.drugs.push_back("drug" + std::to_string(d + 1));
        resp.labels.assign(resp.samples * n, 0);
        for (std::size_t d = 0; d < n; ++d) {
            std::vector<double> score(resp.samples);
            for (std::size_t s = 0; s < resp.samples; ++s) {
                double dot = 0.0;
                for (std::size_t j = 0; j < k; ++j) dot += latent.at(s, j) * drug_dirs.at(d, j);
                score[s] = dot;
            }
            const double med = median_of(score);
            for (std::size_t s = 0; s < resp.samples; ++s) resp.at(s, d) = score[s] > med ? 1 : 0;
        }
        return resp;
    };

    out.cell_response = label_domain(out.cell_latent, out.cell);
    out.patient_truth = label_domain(out.patient_latent, out.patient);
    return out;
}

} // namespace wiser::data
