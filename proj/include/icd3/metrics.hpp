#pragma once

// Chunk-level drift detection metrics: accuracy, G-Mean and rank-based AUC.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace icd3 {

struct ChunkVerdicts {
    std::vector<bool> predicted;
    std::vector<double> score;  // continuous drift score (max theta)
    std::vector<bool> label;

    void validate() const {
        if (predicted.empty()) throw std::invalid_argument("ChunkVerdicts: empty");
        if (predicted.size() != label.size() || predicted.size() != score.size())
            throw std::invalid_argument("ChunkVerdicts: length mismatch");
    }
};

inline double accuracy(const ChunkVerdicts& v) {
    v.validate();
    long correct = 0;
    for (std::size_t i = 0; i < v.predicted.size(); ++i)
        if (v.predicted[i] == v.label[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(v.predicted.size());
}

// sqrt(TPR * TNR), drifted = positive class; 0 when a class is absent.
inline double gmean(const ChunkVerdicts& v) {
    v.validate();
    long tp = 0, fn = 0, tn = 0, fp = 0;
    for (std::size_t i = 0; i < v.predicted.size(); ++i) {
        if (v.label[i])
            (v.predicted[i] ? tp : fn) += 1;
        else
            (v.predicted[i] ? fp : tn) += 1;
    }
    if (tp + fn == 0 || tn + fp == 0) return 0.0;
    const double tpr = static_cast<double>(tp) / static_cast<double>(tp + fn);
    const double tnr = static_cast<double>(tn) / static_cast<double>(tn + fp);
    return std::sqrt(tpr * tnr);
}

// Mann-Whitney AUC of score vs label with ties counted 0.5 (computed via
// average ranks).
inline double auc(const ChunkVerdicts& v) {
    v.validate();
    const std::size_t n = v.score.size();
    long pos = 0;
    for (bool b : v.label) pos += b ? 1 : 0;
    const long neg = static_cast<long>(n) - pos;
    if (pos == 0 || neg == 0) throw std::domain_error("auc: needs both classes");

    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v.score[a] < v.score[b]; });
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v.score[idx[j + 1]] == v.score[idx[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based
        for (std::size_t t = i; t <= j; ++t)
            if (v.label[idx[t]]) rank_sum_pos += avg_rank;
        i = j + 1;
    }
    return (rank_sum_pos - 0.5 * static_cast<double>(pos) * static_cast<double>(pos + 1)) /
           (static_cast<double>(pos) * static_cast<double>(neg));
}

}  // namespace icd3
