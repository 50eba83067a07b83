#pragma once

#include <cstddef>
#include <vector>

#include "sprocket/core.hpp"
#include "sprocket/distances.hpp"

namespace sprocket {

// Prototype activations for one kernel plus the training rows they came from.
struct PrototypeSet {
    std::vector<std::vector<double>> activations;
    std::vector<std::size_t> source_indices;
};

// Smallest positive M with base^M >= n. Exact integer powers of the base do
// not tip over to M+1 (the power is accumulated, never recomputed through
// logs).
std::size_t prototype_count(std::size_t n, double base);

// M distinct indices in [0, n), uniform without replacement (partial
// Fisher-Yates), in draw order.
std::vector<std::size_t> select_uniform(std::size_t n, std::size_t m, RandomStream& stream);

// Per-class quotas by largest-remainder apportionment of M over class
// frequencies (remainders compared as exact integers M*n_c mod n, ties to the
// smaller class id), capped at class size; then uniform without replacement
// within each class.
std::vector<std::size_t> select_stratified(const std::vector<int>& labels, std::size_t m,
                                           RandomStream& stream);

// KMeans++ initialization only: first center uniform, each next center drawn
// with probability proportional to its distance to the nearest chosen center.
// If every remaining candidate sits at distance 0 the draw falls back to
// uniform over the remainder.
std::vector<std::size_t> select_kmeanspp_init(const std::vector<std::vector<double>>& points,
                                              std::size_t m, const DistanceMeasure& measure,
                                              RandomStream& stream,
                                              DistanceCallCounter* counter = nullptr);

}  // namespace sprocket
