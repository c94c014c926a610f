#pragma once

#include "bridgenav/segmentation.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace testutil {

// Scratch file under the system temp directory, removed on destruction.
class TempFile {
public:
    TempFile(const std::string& name, const std::string& content)
        : path_(std::filesystem::temp_directory_path() / ("bridgenav_test_" + std::to_string(std::random_device{}()) + "_" + name))
    {
        std::ofstream(path_, std::ios::binary) << content;
    }
    ~TempFile() { std::filesystem::remove(path_); }
    TempFile(const TempFile&) = delete;
    TempFile& operator=(const TempFile&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// Cluster set from known labels (0..k-1) with boundaries at alpha_s.
inline bridgenav::ClusterSet from_labels(const bridgenav::Points2& pts, const std::vector<int>& labels, double alpha_s)
{
    bridgenav::ClusterSet cs;
    const int k = *std::max_element(labels.begin(), labels.end()) + 1;
    cs.clusters.resize(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c)
        cs.clusters[static_cast<std::size_t>(c)].id = c;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        auto& c = cs.clusters[static_cast<std::size_t>(labels[i])];
        c.points.push_back(pts[i]);
        c.indices.push_back(i);
    }
    for (auto& c : cs.clusters) {
        c.mean = bridgenav::Point2::Zero();
        for (const auto& p : c.points)
            c.mean += p;
        c.mean /= static_cast<double>(c.points.size());
    }
    cs.labels = labels;
    cs.n_c = static_cast<std::size_t>(k);
    bridgenav::compute_boundaries(cs, alpha_s);
    return cs;
}

} // namespace testutil
