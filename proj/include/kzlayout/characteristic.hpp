#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spec_model.hpp"

namespace kzlayout {

/// Unsigned integer of fixed bit width encoding a constraint subset: the
/// highest-priority constraint owns the most significant bit. Comparing two
/// values compares the subsets in the priority order.
class CharacteristicInteger {
public:
    CharacteristicInteger() = default;
    explicit CharacteristicInteger(std::size_t width) : width_(width), words_((width + 63) / 64) {}

    std::size_t width() const noexcept { return width_; }

    bool test(std::size_t bit) const { return (words_[bit / 64] >> (bit % 64)) & 1u; }
    void set(std::size_t bit) { words_[bit / 64] |= std::uint64_t{1} << (bit % 64); }

    std::size_t popcount() const noexcept {
        std::size_t n = 0;
        for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }

    bool is_zero() const noexcept {
        return std::all_of(words_.begin(), words_.end(), [](auto w) { return w == 0; });
    }

    /// Value as a machine word, if it fits.
    std::optional<std::uint64_t> to_u64() const {
        for (std::size_t k = 1; k < words_.size(); ++k)
            if (words_[k] != 0) return std::nullopt;
        return words_.empty() ? 0 : words_[0];
    }

    /// "0x"-prefixed lowercase hex without leading zeros ("0x0" for zero).
    std::string to_hex() const {
        static constexpr char digits[] = "0123456789abcdef";
        std::string out;
        bool leading = true;
        for (std::size_t w = words_.size(); w-- > 0;) {
            for (int nib = 15; nib >= 0; --nib) {
                unsigned d = (words_[w] >> (4 * nib)) & 0xf;
                if (leading && d == 0) continue;
                leading = false;
                out += digits[d];
            }
        }
        return "0x" + (out.empty() ? std::string("0") : out);
    }

    friend std::strong_ordering operator<=>(const CharacteristicInteger& a,
                                            const CharacteristicInteger& b) {
        const std::size_t n = std::max(a.words_.size(), b.words_.size());
        for (std::size_t w = n; w-- > 0;) {
            std::uint64_t x = w < a.words_.size() ? a.words_[w] : 0;
            std::uint64_t y = w < b.words_.size() ? b.words_[w] : 0;
            if (x != y) return x <=> y;
        }
        return std::strong_ordering::equal;
    }
    friend bool operator==(const CharacteristicInteger& a, const CharacteristicInteger& b) {
        return (a <=> b) == 0;
    }

private:
    std::size_t width_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Bit of constraint `id` in the characteristic integer of `s`.
inline std::size_t characteristic_bit(const Specification& s, std::size_t id) {
    return s.size() - 1 - s.rank_position(id);
}

inline CharacteristicInteger characteristic_integer(const Specification& s,
                                                    std::span<const std::size_t> enabled) {
    CharacteristicInteger iota(s.size());
    for (std::size_t id : enabled) iota.set(characteristic_bit(s, id));
    return iota;
}

}  // namespace kzlayout
