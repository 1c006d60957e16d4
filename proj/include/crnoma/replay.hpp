#pragma once

#include "crnoma/rng.hpp"

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <unordered_set>
#include <utility>
#include <vector>

namespace crnoma {

// Fixed-capacity ring with FIFO eviction. Logical index 0 is always the
// oldest stored item. Used both for single transitions and whole episodes.
template <typename T>
class RingBuffer {
 public:
    explicit RingBuffer(std::size_t capacity) : capacity_(capacity) {
        if (capacity == 0) throw std::invalid_argument("RingBuffer: capacity must be positive");
    }

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return items_.size(); }

    void push(T item) {
        if (items_.size() < capacity_) {
            items_.push_back(std::move(item));
        } else {
            items_[head_] = std::move(item);
            head_ = (head_ + 1) % capacity_;
        }
    }

    const T& operator[](std::size_t i) const {
        if (i >= items_.size()) throw std::out_of_range("RingBuffer: index out of range");
        return items_[(head_ + i) % items_.size()];
    }

    // k distinct logical indices, uniform without replacement, ascending.
    std::vector<std::size_t> sample_indices(std::size_t k, Rng& rng) const {
        const std::size_t n = items_.size();
        if (k > n) throw std::logic_error("RingBuffer: sample larger than occupancy");
        std::unordered_set<std::size_t> chosen;
        chosen.reserve(k * 2);
        for (std::size_t j = n - k; j < n; ++j) {
            std::size_t t = static_cast<std::size_t>(rng.below(j + 1));
            if (!chosen.insert(t).second) chosen.insert(j);
        }
        std::vector<std::size_t> out(chosen.begin(), chosen.end());
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<const T*> sample(std::size_t k, Rng& rng) const {
        std::vector<const T*> out;
        out.reserve(k);
        for (std::size_t i : sample_indices(k, rng)) out.push_back(&(*this)[i]);
        return out;
    }

 private:
    std::size_t capacity_;
    std::size_t head_ = 0;
    std::vector<T> items_;
};

} // namespace crnoma
