#pragma once

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "loadcast/errors.hpp"
#include "loadcast/profile.hpp"

namespace loadcast {

// Agglomerative Ward clustering. Distances are kept in squared-Euclidean
// form: the merge distance equals twice the increase in within-cluster sum
// of squares, so two singletons merge at their squared Euclidean distance.
// Cluster ids follow the usual linkage convention: leaves are 0..n-1, the
// cluster created by merge step s gets id n+s.

struct MergeStep {
    int left;   // smaller id of the merged pair
    int right;  // larger id
    double distance;
    int size;   // members in the new cluster
};

struct Dendrogram {
    std::vector<std::string> leaf_codes;
    std::vector<MergeStep> merges;
};

struct ClusterAssignment {
    int k = 0;
    std::map<std::string, int> cluster_of;  // country code -> 1..k
};

inline double squared_distance(const ProfileVector& a, const ProfileVector& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.components.size(); ++i) {
        double d = a.components[i] - b.components[i];
        s += d * d;
    }
    return s;
}

// Lance-Williams update for Ward's criterion on squared distances. Ties are
// broken toward the lexicographically smallest (min id, max id) pair, which
// makes the merge order fully deterministic.
inline Dendrogram ward_dendrogram(const std::vector<ProfileVector>& vectors) {
    const int n = static_cast<int>(vectors.size());
    if (n < 2) throw ConfigError("clustering needs at least 2 profile vectors");
    {
        std::set<std::string> codes;
        for (const auto& v : vectors)
            if (!codes.insert(v.country_code).second)
                throw ConfigError("duplicate country code in clustering input: " + v.country_code);
    }

    struct Active {
        int id;
        int size;
    };
    std::vector<Active> act(n);
    for (int i = 0; i < n; ++i) act[i] = {i, 1};
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) dist[i][j] = dist[j][i] = squared_distance(vectors[i], vectors[j]);

    Dendrogram out;
    out.leaf_codes.reserve(n);
    for (const auto& v : vectors) out.leaf_codes.push_back(v.country_code);

    for (int step = 0; step < n - 1; ++step) {
        const int m = static_cast<int>(act.size());
        int bi = -1, bj = -1;
        double best = std::numeric_limits<double>::infinity();
        int best_lo = 0, best_hi = 0;
        for (int i = 0; i < m; ++i) {
            for (int j = i + 1; j < m; ++j) {
                double d = dist[i][j];
                int lo = std::min(act[i].id, act[j].id);
                int hi = std::max(act[i].id, act[j].id);
                if (d < best || (d == best && (lo < best_lo || (lo == best_lo && hi < best_hi)))) {
                    best = d;
                    bi = i;
                    bj = j;
                    best_lo = lo;
                    best_hi = hi;
                }
            }
        }

        const int na = act[bi].size, nb = act[bj].size;
        out.merges.push_back({best_lo, best_hi, best, na + nb});

        std::vector<double> merged_row(m, 0.0);
        for (int c = 0; c < m; ++c) {
            if (c == bi || c == bj) continue;
            const int nc = act[c].size;
            merged_row[c] = ((na + nc) * dist[bi][c] + (nb + nc) * dist[bj][c] - nc * dist[bi][bj]) /
                            static_cast<double>(na + nb + nc);
        }

        // Replace position bi with the merged cluster, drop bj.
        act[bi] = {n + step, na + nb};
        for (int c = 0; c < m; ++c) {
            dist[bi][c] = dist[c][bi] = merged_row[c];
        }
        dist[bi][bi] = 0.0;
        act.erase(act.begin() + bj);
        dist.erase(dist.begin() + bj);
        for (auto& row : dist) row.erase(row.begin() + bj);
    }
    return out;
}

// Undo the last k-1 merges: apply only the first n-k merge steps and read
// the surviving groups off a union-find. Cluster numbers are assigned 1..k
// in ascending order of each group's smallest country code.
inline ClusterAssignment cut_clusters(const Dendrogram& dg, int k) {
    const int n = static_cast<int>(dg.leaf_codes.size());
    if (k < 1 || k > n) throw ConfigError("cluster count k must be in [1, " + std::to_string(n) + "]");

    std::vector<int> parent(n + dg.merges.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int s = 0; s < n - k; ++s) {
        const MergeStep& ms = dg.merges[s];
        int target = n + s;
        parent[find(ms.left)] = target;
        parent[find(ms.right)] = target;
    }

    std::map<int, std::vector<std::string>> groups;
    for (int leaf = 0; leaf < n; ++leaf) groups[find(leaf)].push_back(dg.leaf_codes[leaf]);

    std::map<std::string, int> order;  // smallest member code -> root
    std::map<int, std::string> smallest;
    for (auto& [root, members] : groups) {
        std::string lo = members.front();
        for (const auto& c : members)
            if (c < lo) lo = c;
        order[lo] = root;
        smallest[root] = lo;
    }

    ClusterAssignment out;
    out.k = k;
    int next_id = 1;
    for (const auto& [lo, root] : order) {
        for (const auto& c : groups[root]) out.cluster_of[c] = next_id;
        ++next_id;
    }
    return out;
}

inline void write_dendrogram_csv(const Dendrogram& dg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "step,left,right,distance,size\n";
    char buf[64];
    for (std::size_t s = 0; s < dg.merges.size(); ++s) {
        std::snprintf(buf, sizeof buf, "%.12g", dg.merges[s].distance);
        out << s << ',' << dg.merges[s].left << ',' << dg.merges[s].right << ',' << buf << ','
            << dg.merges[s].size << '\n';
    }
}

inline void write_assignment_csv(const ClusterAssignment& ca, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "country,cluster\n";
    for (const auto& [code, cl] : ca.cluster_of) out << code << ',' << cl << '\n';
}

inline ClusterAssignment read_assignment_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("missing cluster assignment '" + path + "'; run the cluster stage first");
    ClusterAssignment ca;
    std::string line;
    bool header = true;
    int max_cluster = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header) {
            header = false;
            if (line == "country,cluster") continue;
        }
        auto comma = line.find(',');
        if (comma == std::string::npos) throw DataError("bad assignment row '" + line + "' in " + path);
        std::string code = line.substr(0, comma);
        int cl = std::atoi(line.c_str() + comma + 1);
        if (cl < 1) throw DataError("bad cluster id in row '" + line + "' of " + path);
        ca.cluster_of[code] = cl;
        max_cluster = std::max(max_cluster, cl);
    }
    if (ca.cluster_of.empty()) throw DataError("assignment file '" + path + "' is empty");
    ca.k = max_cluster;
    return ca;
}

}  // namespace loadcast
