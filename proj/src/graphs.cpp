#include "sslab/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <bit>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sslab::graphs {

namespace {

RealMatrix zero_adjacency(int n) { return RealMatrix::Zero(n, n); }

void add_edge(RealMatrix& a, int u, int v) {
    a(u, v) = 1.0;
    a(v, u) = 1.0;
}

long checked_power(long base, int exp, long cap) {
    long value = 1;
    for (int i = 0; i < exp; ++i) {
        if (value > cap / base + 1) return cap + 1;
        value *= base;
    }
    return value;
}

// Next k-combination of [0, n) in lexicographic order; false when exhausted.
bool next_combination(std::vector<int>& c, int n) {
    const int k = static_cast<int>(c.size());
    for (int i = k - 1; i >= 0; --i) {
        if (c[i] < n - k + i) {
            ++c[i];
            for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
            return true;
        }
    }
    return false;
}

int mod_inverse(int a, int p) {
    // p prime, a != 0 mod p
    int result = 1;
    int base = a % p;
    int e = p - 2;
    while (e > 0) {
        if (e & 1) result = static_cast<int>((static_cast<long>(result) * base) % p);
        base = static_cast<int>((static_cast<long>(base) * base) % p);
        e >>= 1;
    }
    return result;
}

// Rank over F_2 of rows packed as bitmasks.
int rank_f2(const uint32_t* rows, int count) {
    uint32_t basis[32] = {0};
    int rank = 0;
    for (int i = 0; i < count; ++i) {
        uint32_t v = rows[i];
        while (v) {
            const int lead = 31 - std::countl_zero(v);
            if (!basis[lead]) {
                basis[lead] = v;
                ++rank;
                break;
            }
            v ^= basis[lead];
        }
    }
    return rank;
}

// Rank over F_q (q prime) of a rows x cols array stored row-major.
int rank_fq(std::vector<int>& m, int rows, int cols, int q, const std::vector<int>& inv) {
    int rank = 0;
    for (int col = 0; col < cols && rank < rows; ++col) {
        int pivot = -1;
        for (int r = rank; r < rows; ++r) {
            if (m[r * cols + col] != 0) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0) continue;
        for (int c = col; c < cols; ++c) std::swap(m[pivot * cols + c], m[rank * cols + c]);
        const int scale = inv[m[rank * cols + col]];
        for (int c = col; c < cols; ++c) {
            m[rank * cols + c] = static_cast<int>((static_cast<long>(m[rank * cols + c]) * scale) % q);
        }
        for (int r = rank + 1; r < rows; ++r) {
            const int f = m[r * cols + col];
            if (f == 0) continue;
            for (int c = col; c < cols; ++c) {
                long val = m[r * cols + c] - static_cast<long>(f) * m[rank * cols + c];
                m[r * cols + c] = static_cast<int>(((val % q) + q) % q);
            }
        }
        ++rank;
    }
    return rank;
}

} // namespace

std::string family_name(Family f) {
    switch (f) {
        case Family::complete: return "complete";
        case Family::cycle: return "cycle";
        case Family::hamming: return "hamming";
        case Family::johnson: return "johnson";
        case Family::grassmann: return "grassmann";
        case Family::paley: return "paley";
        case Family::cycle_inverse_matching: return "cycle_inverse_matching";
    }
    return "unknown";
}

std::string convention_name(Convention c) {
    return c == Convention::unit_interval ? "unit" : "symmetric";
}

std::string GraphInstance::spec_string() const {
    std::ostringstream out;
    out << family_name(family);
    char sep = ':';
    for (const auto& [key, value] : params) {
        out << sep << key << '=' << value;
        sep = ',';
    }
    return out.str();
}

long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    long value = 1;
    for (int i = 1; i <= k; ++i) {
        value = value * (n - k + i) / i;
    }
    return value;
}

long gaussian_binomial(int n, int k, int q) {
    if (k < 0 || k > n) return 0;
    // [n k]_q = prod_{i=0}^{k-1} (q^{n-i} - 1) / (q^{i+1} - 1), exact at every step
    long value = 1;
    for (int i = 0; i < k; ++i) {
        long num = checked_power(q, n - i, std::numeric_limits<long>::max() / 2) - 1;
        long den = checked_power(q, i + 1, std::numeric_limits<long>::max() / 2) - 1;
        value = value * num / den;
    }
    return value;
}

bool is_prime(int p) {
    if (p < 2) return false;
    for (int d = 2; static_cast<long>(d) * d <= p; ++d) {
        if (p % d == 0) return false;
    }
    return true;
}

GraphInstance complete(int n) {
    if (n < 2) throw std::invalid_argument("complete: need n >= 2");
    GraphInstance g;
    g.family = Family::complete;
    g.params["n"] = n;
    g.num_vertices = n;
    g.size_param = n;
    g.adjacency = RealMatrix::Ones(n, n) - RealMatrix::Identity(n, n);
    g.expected_spectrum = {{static_cast<double>(n - 1), 1}, {-1.0, n - 1}};
    return g;
}

GraphInstance cycle(int n) {
    if (n < 3) throw std::invalid_argument("cycle: need n >= 3");
    GraphInstance g;
    g.family = Family::cycle;
    g.params["n"] = n;
    g.num_vertices = n;
    g.size_param = n;
    g.adjacency = zero_adjacency(n);
    for (int v = 0; v < n; ++v) add_edge(g.adjacency, v, (v + 1) % n);
    for (int j = 0; j <= n / 2; ++j) {
        const double value = 2.0 * std::cos(2.0 * M_PI * j / n);
        const int mult = (j == 0 || 2 * j == n) ? 1 : 2;
        g.expected_spectrum.emplace_back(value, mult);
    }
    return g;
}

GraphInstance hamming(int n, int q, int size_cap) {
    if (n < 1 || q < 2) throw std::invalid_argument("hamming: need n >= 1, q >= 2");
    const long vertices = checked_power(q, n, size_cap);
    if (vertices > size_cap) throw std::invalid_argument("hamming: q^n exceeds the size cap");
    const int N = static_cast<int>(vertices);
    GraphInstance g;
    g.family = Family::hamming;
    g.params["n"] = n;
    g.params["q"] = q;
    g.num_vertices = N;
    g.size_param = n;
    g.adjacency = zero_adjacency(N);
    // vertex index = base-q digits; neighbors differ in exactly one digit
    for (int v = 0; v < N; ++v) {
        long stride = 1;
        for (int pos = 0; pos < n; ++pos) {
            const int digit = static_cast<int>((v / stride) % q);
            for (int other = 0; other < q; ++other) {
                if (other == digit) continue;
                const int u = static_cast<int>(v + (other - digit) * stride);
                add_edge(g.adjacency, v, u);
            }
            stride *= q;
        }
    }
    for (int r = 0; r <= n; ++r) {
        const double value = static_cast<double>(n) * (q - 1) - static_cast<double>(q) * r;
        long mult = binomial(n, r);
        for (int i = 0; i < r; ++i) mult *= (q - 1);
        g.expected_spectrum.emplace_back(value, static_cast<int>(mult));
    }
    return g;
}

GraphInstance johnson(int n, int k, int size_cap) {
    if (k < 1 || 2 * k > n) {
        throw std::invalid_argument("johnson: need 1 <= k <= n/2 (use complement parameters)");
    }
    const long vertices = binomial(n, k);
    if (vertices > size_cap) throw std::invalid_argument("johnson: C(n,k) exceeds the size cap");
    if (n > 62) throw std::invalid_argument("johnson: n too large for subset masks");
    const int N = static_cast<int>(vertices);
    GraphInstance g;
    g.family = Family::johnson;
    g.params["n"] = n;
    g.params["k"] = k;
    g.num_vertices = N;
    g.size_param = n;
    g.adjacency = zero_adjacency(N);
    std::vector<uint64_t> masks;
    masks.reserve(N);
    std::vector<int> comb(k);
    std::iota(comb.begin(), comb.end(), 0);
    do {
        uint64_t m = 0;
        for (int c : comb) m |= (uint64_t{1} << c);
        masks.push_back(m);
    } while (next_combination(comb, n));
    for (int u = 0; u < N; ++u) {
        for (int v = u + 1; v < N; ++v) {
            if (std::popcount(masks[u] & masks[v]) == k - 1) add_edge(g.adjacency, u, v);
        }
    }
    for (int r = 0; r <= k; ++r) {
        const double value = static_cast<double>(k - r) * (n - k - r) - r;
        const long mult = binomial(n, r) - binomial(n, r - 1);
        g.expected_spectrum.emplace_back(value, static_cast<int>(mult));
    }
    return g;
}

GraphInstance grassmann(int q, int n, int k, int size_cap) {
    if (!is_prime(q)) throw std::invalid_argument("grassmann: q must be prime");
    if (k < 1 || n < 2 * k) throw std::invalid_argument("grassmann: need 1 <= k and n >= 2k");
    const long vertices = gaussian_binomial(n, k, q);
    if (vertices > size_cap) {
        throw std::invalid_argument("grassmann: [n k]_q exceeds the size cap");
    }
    const int N = static_cast<int>(vertices);
    GraphInstance g;
    g.family = Family::grassmann;
    g.params["q"] = q;
    g.params["n"] = n;
    g.params["k"] = k;
    g.num_vertices = N;
    g.size_param = n;
    g.adjacency = zero_adjacency(N);

    // Enumerate k-subspaces of F_q^n by reduced-row-echelon form, ordered by
    // pivot-column profile then by the free entries read as base-q digits.
    std::vector<std::vector<int>> basis; // one RREF matrix (k rows x n cols) per vertex
    basis.reserve(N);
    std::vector<int> pivots(k);
    std::iota(pivots.begin(), pivots.end(), 0);
    do {
        std::vector<std::pair<int, int>> free_positions;
        for (int i = 0; i < k; ++i) {
            for (int j = pivots[i] + 1; j < n; ++j) {
                if (std::find(pivots.begin(), pivots.end(), j) == pivots.end()) {
                    free_positions.emplace_back(i, j);
                }
            }
        }
        std::vector<int> digits(free_positions.size(), 0);
        while (true) {
            std::vector<int> m(static_cast<size_t>(k) * n, 0);
            for (int i = 0; i < k; ++i) m[i * n + pivots[i]] = 1;
            for (size_t f = 0; f < free_positions.size(); ++f) {
                m[free_positions[f].first * n + free_positions[f].second] = digits[f];
            }
            basis.push_back(std::move(m));
            size_t pos = 0;
            while (pos < digits.size() && digits[pos] == q - 1) digits[pos++] = 0;
            if (pos == digits.size()) break;
            ++digits[pos];
        }
    } while (next_combination(pivots, n));
    if (static_cast<int>(basis.size()) != N) {
        throw std::runtime_error("grassmann: subspace enumeration mismatch");
    }

    // dim(A ^ B) = 2k - rank([A; B]); adjacency when that equals k - 1.
    if (q == 2 && n <= 32) {
        std::vector<uint32_t> rows(static_cast<size_t>(N) * k);
        for (int v = 0; v < N; ++v) {
            for (int i = 0; i < k; ++i) {
                uint32_t word = 0;
                for (int j = 0; j < n; ++j) {
                    if (basis[v][i * n + j]) word |= (uint32_t{1} << (n - 1 - j));
                }
                rows[static_cast<size_t>(v) * k + i] = word;
            }
        }
        std::vector<uint32_t> stack(2 * k);
        for (int u = 0; u < N; ++u) {
            std::copy(rows.begin() + static_cast<long>(u) * k,
                      rows.begin() + static_cast<long>(u + 1) * k, stack.begin());
            for (int v = u + 1; v < N; ++v) {
                std::copy(rows.begin() + static_cast<long>(v) * k,
                          rows.begin() + static_cast<long>(v + 1) * k, stack.begin() + k);
                if (rank_f2(stack.data(), 2 * k) == k + 1) add_edge(g.adjacency, u, v);
            }
        }
    } else {
        std::vector<int> inv(q, 0);
        for (int a = 1; a < q; ++a) inv[a] = mod_inverse(a, q);
        std::vector<int> stack(static_cast<size_t>(2 * k) * n);
        for (int u = 0; u < N; ++u) {
            for (int v = u + 1; v < N; ++v) {
                std::copy(basis[u].begin(), basis[u].end(), stack.begin());
                std::copy(basis[v].begin(), basis[v].end(), stack.begin() + static_cast<long>(k) * n);
                if (rank_fq(stack, 2 * k, n, q, inv) == k + 1) add_edge(g.adjacency, u, v);
            }
        }
    }

    for (int r = 0; r <= k; ++r) {
        const double value =
            static_cast<double>(checked_power(q, r + 1, 1L << 40)) * gaussian_binomial(k - r, 1, q) *
                gaussian_binomial(n - k - r, 1, q) -
            gaussian_binomial(r, 1, q);
        const long mult = gaussian_binomial(n, r, q) - gaussian_binomial(n, r - 1, q);
        g.expected_spectrum.emplace_back(value, static_cast<int>(mult));
    }
    return g;
}

GraphInstance paley(int p, int size_cap) {
    if (!is_prime(p) || p % 4 != 1) {
        throw std::invalid_argument("paley: p must be prime with p = 1 mod 4");
    }
    if (p > size_cap) throw std::invalid_argument("paley: p exceeds the size cap");
    GraphInstance g;
    g.family = Family::paley;
    g.params["p"] = p;
    g.num_vertices = p;
    g.size_param = p;
    g.adjacency = zero_adjacency(p);
    std::set<int> residues;
    for (int x = 1; x < p; ++x) residues.insert(static_cast<int>((static_cast<long>(x) * x) % p));
    for (int u = 0; u < p; ++u) {
        for (int v = u + 1; v < p; ++v) {
            if (residues.count((v - u) % p)) add_edge(g.adjacency, u, v);
        }
    }
    const double root = std::sqrt(static_cast<double>(p));
    g.expected_spectrum = {{(p - 1) / 2.0, 1},
                           {(-1.0 + root) / 2.0, (p - 1) / 2},
                           {(-1.0 - root) / 2.0, (p - 1) / 2}};
    return g;
}

GraphInstance cycle_inverse_matching(int p, int size_cap) {
    if (!is_prime(p) || p < 5) throw std::invalid_argument("cycle_inverse_matching: p must be prime, p >= 5");
    if (p > size_cap) throw std::invalid_argument("cycle_inverse_matching: p exceeds the size cap");
    GraphInstance g;
    g.family = Family::cycle_inverse_matching;
    g.params["p"] = p;
    g.num_vertices = p;
    g.size_param = p;
    g.adjacency = zero_adjacency(p);
    for (int v = 0; v < p; ++v) add_edge(g.adjacency, v, (v + 1) % p);
    // matching x <-> x^{-1} mod p; 0 is unmatched and self-inverse points keep no loop
    for (int x = 1; x < p; ++x) {
        const int y = mod_inverse(x, p);
        if (y != x) add_edge(g.adjacency, x, y);
    }
    return g;
}

std::string FamilySpec::to_string() const {
    std::ostringstream out;
    out << family_name(family);
    char sep = ':';
    for (const auto& [key, value] : params) {
        out << sep << key << '=' << value;
        sep = ',';
    }
    return out.str();
}

FamilySpec parse_family_spec(const std::string& text) {
    FamilySpec spec;
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    bool known = false;
    for (Family f : {Family::complete, Family::cycle, Family::hamming, Family::johnson,
                     Family::grassmann, Family::paley, Family::cycle_inverse_matching}) {
        if (name == family_name(f)) {
            spec.family = f;
            known = true;
            break;
        }
    }
    if (!known) throw std::invalid_argument("unknown family: '" + name + "'");
    if (colon == std::string::npos) return spec;
    std::string rest = text.substr(colon + 1);
    std::istringstream stream(rest);
    std::string item;
    while (std::getline(stream, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
            throw std::invalid_argument("malformed family parameter: '" + item + "'");
        }
        const std::string key = item.substr(0, eq);
        if (key != "n" && key != "q" && key != "k" && key != "p") {
            throw std::invalid_argument("unknown family parameter key: '" + key + "'");
        }
        long value = 0;
        try {
            size_t used = 0;
            value = std::stol(item.substr(eq + 1), &used);
            if (used != item.size() - eq - 1) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw std::invalid_argument("malformed integer in family spec: '" + item + "'");
        }
        spec.params[key] = value;
    }
    return spec;
}

GraphInstance build_member(const FamilySpec& spec, std::optional<int> size, int size_cap) {
    auto param = [&](const std::string& key, std::optional<long> fallback = std::nullopt) {
        auto it = spec.params.find(key);
        if (it != spec.params.end()) return it->second;
        if (fallback) return *fallback;
        throw std::invalid_argument("family spec is missing parameter '" + key + "'");
    };
    const bool sized_by_p =
        spec.family == Family::paley || spec.family == Family::cycle_inverse_matching;
    long n = 0;
    if (size) {
        n = *size;
    } else {
        n = sized_by_p ? param("p") : param("n");
    }
    switch (spec.family) {
        case Family::complete: return complete(static_cast<int>(n));
        case Family::cycle: return cycle(static_cast<int>(n));
        case Family::hamming:
            return hamming(static_cast<int>(n), static_cast<int>(param("q")), size_cap);
        case Family::johnson:
            return johnson(static_cast<int>(n), static_cast<int>(param("k")), size_cap);
        case Family::grassmann:
            return grassmann(static_cast<int>(param("q")), static_cast<int>(n),
                             static_cast<int>(param("k")), size_cap);
        case Family::paley: return paley(static_cast<int>(n), size_cap);
        case Family::cycle_inverse_matching:
            return cycle_inverse_matching(static_cast<int>(n), size_cap);
    }
    throw std::invalid_argument("unhandled family");
}

NormalizedHamiltonian normalize_adjacency(const GraphInstance& g, Convention convention) {
    const RealVector values = linalg::symmetric_eigenvalues(g.adjacency);
    const double top = values(0);
    if (values.size() < 2 || top <= 0.0) {
        throw std::invalid_argument("normalize_adjacency: graph has no positive top eigenvalue");
    }
    if (top - values(1) <= 1e-9 * std::max(1.0, top)) {
        throw std::invalid_argument(
            "normalize_adjacency: top eigenvalue is not simple (graph disconnected?)");
    }
    NormalizedHamiltonian h;
    h.convention = convention;
    h.source_spectral_norm = top;
    RealMatrix scaled = g.adjacency / top;
    if (convention == Convention::unit_interval) {
        scaled = (scaled + RealMatrix::Identity(g.num_vertices, g.num_vertices)) / 2.0;
        h.spectrum = ((values.array() / top + 1.0) / 2.0).matrix();
    } else {
        h.spectrum = (values.array() / top).matrix();
    }
    h.h = std::make_shared<RealMatrix>(std::move(scaled));
    return h;
}

} // namespace sslab::graphs
