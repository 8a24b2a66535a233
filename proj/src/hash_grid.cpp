#include "gsdyn/hash_grid.hpp"

#include <cmath>

namespace gsdyn {

namespace {
constexpr std::array<std::array<int, 3>, 4> kProjectionAxes = {{
    {0, 1, 2},  // xyz
    {0, 1, 3},  // xyt
    {1, 2, 3},  // yzt
    {0, 2, 3},  // xzt
}};
}

HashGridSet::HashGridSet(HashConfig cfg, Rng& rng) : cfg_(cfg) {
    const int64_t table_size = int64_t{1} << cfg_.log2_table;
    for (int p = 0; p < 4; ++p) {
        for (int l = 1; l <= cfg_.levels; ++l) {
            GridMeta m;
            m.axes = kProjectionAxes[p];
            int64_t cells = 1;
            for (int a = 0; a < 3; ++a) {
                m.res[a] = resolution(l, m.axes[a]);
                cells *= m.res[a] + 1;
            }
            m.dense = cells <= table_size;
            m.rows = m.dense ? cells : table_size;
            meta_[p].push_back(m);

            std::vector<double> init(static_cast<size_t>(m.rows) * cfg_.features);
            for (auto& v : init) v = to_f32(rng.uniform(-1e-4, 1e-4));
            tables_[p].push_back(
                Tensor::values({static_cast<int>(m.rows), cfg_.features}, std::move(init), true));
        }
    }
}

HashGridSet::Encoded HashGridSet::encode(const Tensor& x, const Tensor& y, const Tensor& z,
                                         const Tensor& t) const {
    const std::array<const Tensor*, 4> coords = {&x, &y, &z, &t};
    const int n = static_cast<int>(x.size());
    static const char* kAxisNames = "xyzt";

    std::array<Tensor, 4> clamped;
    for (int a = 0; a < 4; ++a) {
        const auto& d = coords[a]->data();
        bool out_of_range = false;
        for (int i = 0; i < n; ++i) {
            if (d[i] < 0.0 || d[i] > 1.0) {
                if (checked_mode()) {
                    throw CheckedModeError(std::string("encode: coordinate ") + kAxisNames[a] +
                                           " = " + std::to_string(d[i]) + " outside [0,1] at sample " +
                                           std::to_string(i));
                }
                out_of_range = true;
                break;
            }
        }
        // clamp(v, 0, 1) = 1 - relu(1 - relu(v))
        clamped[a] = out_of_range ? sub(Tensor::full({n}, 1.0), relu(sub(Tensor::full({n}, 1.0),
                                                                         relu(*coords[a]))))
                                  : *coords[a];
    }

    Tensor proj_feat[4];
    for (int p = 0; p < 4; ++p) {
        for (int l = 0; l < cfg_.levels; ++l) {
            const GridMeta& m = meta_[p][l];
            const Tensor& tbl = tables_[p][l];

            std::array<Tensor, 3> frac;
            std::array<std::vector<int64_t>, 3> cell;
            for (int a = 0; a < 3; ++a) {
                const Tensor& c = clamped[m.axes[a]];
                Tensor scaled = mul_scalar(c, static_cast<double>(m.res[a]));
                cell[a].resize(n);
                std::vector<double> cell_f(n);
                for (int i = 0; i < n; ++i) {
                    int64_t v = static_cast<int64_t>(std::floor(scaled.at(i)));
                    v = std::clamp<int64_t>(v, 0, m.res[a] - 1);
                    cell[a][i] = v;
                    cell_f[i] = static_cast<double>(v);
                }
                frac[a] = sub(scaled, Tensor::values({n}, std::move(cell_f)));
            }
            std::array<Tensor, 3> one_minus;
            for (int a = 0; a < 3; ++a) one_minus[a] = sub(Tensor::full({n}, 1.0), frac[a]);

            Tensor level_feat;
            for (int corner = 0; corner < 8; ++corner) {
                const std::array<int, 3> off = {corner & 1, (corner >> 1) & 1, (corner >> 2) & 1};
                Tensor w = mul(mul(off[0] ? frac[0] : one_minus[0], off[1] ? frac[1] : one_minus[1]),
                               off[2] ? frac[2] : one_minus[2]);
                std::vector<int64_t> rows(n);
                for (int i = 0; i < n; ++i) {
                    const std::array<int64_t, 3> v = {cell[0][i] + off[0], cell[1][i] + off[1],
                                                      cell[2][i] + off[2]};
                    rows[i] = m.dense ? (v[0] * (m.res[1] + 1) + v[1]) * (m.res[2] + 1) + v[2]
                                      : hash_index(v, m.rows);
                }
                Tensor contrib = mul(gather(tbl, std::move(rows)), reshape(w, {n, 1}));
                level_feat = level_feat.defined() ? add(level_feat, contrib) : contrib;
            }
            proj_feat[p] = proj_feat[p].defined() ? concat(proj_feat[p], level_feat, 1) : level_feat;
        }
    }

    Encoded out;
    out.h_s = proj_feat[0];
    out.h_t = concat(concat(proj_feat[1], proj_feat[2], 1), proj_feat[3], 1);
    return out;
}

std::vector<Param> HashGridSet::params(double lr_scale) {
    std::vector<Param> out;
    static const char* kProjNames[4] = {"xyz", "xyt", "yzt", "xzt"};
    for (int p = 0; p < 4; ++p) {
        for (int l = 0; l < cfg_.levels; ++l) {
            out.push_back({std::string("hash.") + kProjNames[p] + ".l" + std::to_string(l + 1),
                           tables_[p][l], lr_scale});
        }
    }
    return out;
}

}  // namespace gsdyn
