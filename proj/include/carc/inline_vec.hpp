#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cstddef>
#include <span>
#include <type_traits>

namespace carc {

// Fixed-capacity vector with inline storage. Copies touch only the live
// prefix, which keeps GameState copies allocation-free and proportional to
// the number of tiles actually on the board.
template <typename T, std::size_t N>
class InlineVec {
  static_assert(std::is_trivially_copyable_v<T>);

 public:
  using value_type = T;
  using iterator = T*;
  using const_iterator = const T*;

  InlineVec() = default;
  InlineVec(const InlineVec& other) : size_(other.size_) {
    std::copy_n(other.data_.data(), size_, data_.data());
  }
  InlineVec& operator=(const InlineVec& other) {
    size_ = other.size_;
    std::copy_n(other.data_.data(), size_, data_.data());
    return *this;
  }

  static constexpr std::size_t capacity() { return N; }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  bool full() const { return size_ == N; }

  void push_back(const T& v) {
    assert(size_ < N);
    data_[size_++] = v;
  }
  void pop_back() {
    assert(size_ > 0);
    --size_;
  }
  void clear() { size_ = 0; }
  void resize(std::size_t n, const T& fill = T{}) {
    assert(n <= N);
    for (std::size_t i = size_; i < n; ++i) data_[i] = fill;
    size_ = n;
  }
  // Removes element i by moving the last element into its place.
  void swap_remove(std::size_t i) {
    assert(i < size_);
    data_[i] = data_[size_ - 1];
    --size_;
  }
  void erase_at(std::size_t i) {
    assert(i < size_);
    std::copy(data_.begin() + i + 1, data_.begin() + size_, data_.begin() + i);
    --size_;
  }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }
  T& back() { return data_[size_ - 1]; }
  const T& back() const { return data_[size_ - 1]; }

  T* begin() { return data_.data(); }
  T* end() { return data_.data() + size_; }
  const T* begin() const { return data_.data(); }
  const T* end() const { return data_.data() + size_; }

  std::span<const T> span() const { return {data_.data(), size_}; }

  friend bool operator==(const InlineVec& a, const InlineVec& b) {
    return std::equal(a.begin(), a.end(), b.begin(), b.end());
  }

 private:
  std::size_t size_ = 0;
  std::array<T, N> data_;
};

}  // namespace carc
