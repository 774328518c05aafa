// Copyright 2026 The spinrelax Project Developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied. See the License for the specific language governing
// permissions and limitations under the License.

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <spinrelax/errors.hpp>
#include <spinrelax/io_formats.hpp>
#include <spinrelax/structures.hpp>

using namespace spinrelax;

namespace {
std::size_t count_species(const Supercell& c, Species s) {
    std::size_t k = 0;
    for (const auto& a : c.atoms)
        k += a.species == s ? 1 : 0;
    return k;
}
} // namespace

TEST_CASE("species and masses") {
    CHECK(default_mass(Species::B) == 10.811);
    CHECK(default_mass(Species::N) == 14.007);
    CHECK(parse_species("B") == Species::B);
    CHECK(species_label(Species::N) == "N");
    CHECK_THROWS_AS(parse_species("C"), validation_error);
}

TEST_CASE("monolayer builder") {
    const Supercell one = build_monolayer(1, 1, 2.51);
    REQUIRE(one.size() == 2);
    CHECK(one.min_interatomic_distance() == doctest::Approx(2.51 / std::sqrt(3.)).epsilon(1e-12));
    CHECK(bond_length() == doctest::Approx(1.449).epsilon(1e-3));

    const Supercell six = build_monolayer(6, 6);
    CHECK(six.size() == 72);
    CHECK(count_species(six, Species::B) == 36);
    for (const auto& a : six.atoms) {
        CHECK(a.position.z() == 0.);
        CHECK(a.mass == default_mass(a.species));
    }
    CHECK_FALSE(six.periodic[2]);
    CHECK(six.lattice_vectors[2].norm() >= 20.);
    CHECK_NOTHROW(six.validate());
    CHECK(build_monolayer(12, 12).size() == 288);
    CHECK_THROWS_AS(build_monolayer(0, 3), validation_error);
}

TEST_CASE("AA' stacking puts N over B") {
    const Supercell c = build_stacked(6, 6, 2, Stacking::AAprime, 3.3);
    REQUIRE(c.size() == 144);
    CHECK(c.periodic[2]);
    for (const auto& b : c.atoms) {
        if (b.species != Species::B)
            continue;
        int partners = 0;
        for (const auto& n : c.atoms) {
            if (n.species != Species::N)
                continue;
            const Eigen::Vector3d d = c.minimum_image(n.position - b.position);
            if (std::hypot(d.x(), d.y()) < 1e-9 && std::abs(std::abs(d.z()) - 3.3) < 1e-9)
                ++partners;
        }
        CHECK(partners >= 1);
    }
    CHECK(build_stacked(1, 1, 2, Stacking::AAprime).size() == 4);
    CHECK_THROWS_AS(build_stacked(2, 2, 3, Stacking::AAprime), validation_error);
    CHECK_THROWS_AS(build_stacked(2, 2, 1, Stacking::ABC), validation_error);
}

TEST_CASE("ABC stacking shifts each layer by one bond") {
    const Supercell c = build_stacked(6, 6, 2, Stacking::ABC, 3.3);
    REQUIRE(c.size() == 144);
    for (std::size_t i = 0; i < 72; ++i) {
        const Eigen::Vector3d d = c.atoms[i + 72].position - c.atoms[i].position;
        CHECK(d.z() == doctest::Approx(3.3));
        CHECK(std::hypot(d.x(), d.y()) == doctest::Approx(bond_length()).epsilon(1e-12));
        CHECK(c.atoms[i + 72].species == c.atoms[i].species);
    }
    CHECK_NOTHROW(c.validate());
    CHECK(parse_stacking("abc") == Stacking::ABC);
    CHECK(parse_stacking("AAprime") == Stacking::AAprime);
    CHECK_THROWS_AS(parse_stacking("AB"), validation_error);
}

TEST_CASE("boron vacancy") {
    const Supercell host = build_monolayer(6, 6);
    const std::size_t site = central_site(host, Species::B);
    const DefectCell dc = make_vacancy(host, site);
    CHECK(dc.cell.size() == 71);
    const auto r = neighbor_positions(dc.cell, dc.vacancy);
    for (int k = 0; k < 3; ++k) {
        CHECK(dc.cell.atoms[dc.vacancy.neighbors[k]].species == Species::N);
        CHECK((r[k] - dc.vacancy.site).norm() == doctest::Approx(bond_length()).epsilon(1e-12));
    }
    // The neighbours map onto each other under 120 degree rotations.
    const Eigen::Matrix3d R =
        Eigen::AngleAxisd(2. * std::numbers::pi / 3., Eigen::Vector3d::UnitZ()).toRotationMatrix();
    for (int k = 0; k < 3; ++k) {
        const Eigen::Vector3d rotated = dc.vacancy.site + R * (r[k] - dc.vacancy.site);
        double best = 1e9;
        for (int j = 0; j < 3; ++j)
            best = std::min(best, (rotated - r[j]).norm());
        CHECK(best < 1e-10);
    }

    std::size_t n_site = 0;
    while (host.atoms[n_site].species != Species::N)
        ++n_site;
    CHECK_THROWS_AS(make_vacancy(host, n_site), validation_error);
    CHECK_THROWS_AS(make_vacancy(host, host.size()), validation_error);

    const Supercell corner_host = build_monolayer(4, 4);
    const DefectCell corner = make_vacancy(corner_host, 0);
    for (int k = 0; k < 3; ++k)
        CHECK((neighbor_positions(corner.cell, corner.vacancy)[k] - corner.vacancy.site).norm() ==
              doctest::Approx(bond_length()).epsilon(1e-12));
}

TEST_CASE("stacked vacancy keeps the monolayer neighbour geometry") {
    const Supercell mono = build_monolayer(6, 6);
    const DefectCell m = make_vacancy(mono, central_site(mono, Species::B));
    const Supercell aa = build_stacked(6, 6, 2, Stacking::AAprime);
    const DefectCell s = make_vacancy(aa, central_site(aa, Species::B, 0));
    CHECK(s.cell.size() == 143);
    const auto rm = neighbor_positions(m.cell, m.vacancy);
    const auto rs = neighbor_positions(s.cell, s.vacancy);
    for (int k = 0; k < 3; ++k) {
        const Eigen::Vector3d a = rm[k] - m.vacancy.site;
        double best = 1e9;
        for (int j = 0; j < 3; ++j)
            best = std::min(best, (a - (rs[j] - s.vacancy.site)).norm());
        CHECK(best < 1e-10);
    }
}

TEST_CASE("horizontal mirror through the vacancy") {
    const Eigen::Vector3d z = Eigen::Vector3d::UnitZ();
    const Supercell mono = build_monolayer(6, 6);
    const DefectCell m = make_vacancy(mono, central_site(mono, Species::B));
    CHECK(has_mirror_plane(m.cell, m.vacancy.site, z));

    const Supercell aa = build_stacked(6, 6, 2, Stacking::AAprime);
    const DefectCell a = make_vacancy(aa, central_site(aa, Species::B, 0));
    CHECK(has_mirror_plane(a.cell, a.vacancy.site, z));

    const Supercell abc = build_stacked(6, 6, 2, Stacking::ABC);
    const DefectCell c = make_vacancy(abc, central_site(abc, Species::B, 0));
    CHECK_FALSE(has_mirror_plane(c.cell, c.vacancy.site, z));
}

TEST_CASE("supercell invariants") {
    Supercell c = build_monolayer(2, 2);
    c.atoms[1].position = c.atoms[0].position + Eigen::Vector3d(0.1, 0., 0.);
    CHECK_THROWS_AS(c.validate(), validation_error);

    Supercell flat = build_monolayer(2, 2);
    flat.lattice_vectors[2] = flat.lattice_vectors[0];
    CHECK_THROWS_AS(flat.validate(), validation_error);

    Supercell massless = build_monolayer(2, 2);
    massless.atoms[0].mass = 0.;
    CHECK_THROWS_AS(massless.validate(), validation_error);
}

TEST_CASE("minimum image and image enumeration") {
    const Supercell c = build_monolayer(3, 3);
    const Eigen::Vector3d a = c.lattice_vectors[0];
    const Eigen::Vector3d d = c.minimum_image(a + Eigen::Vector3d(0.2, 0., 0.));
    CHECK(d.norm() == doctest::Approx(0.2).epsilon(1e-12));
    const auto images = c.images_within(0, 0, a.norm() + 1e-9);
    CHECK(images.size() == 6);
}

TEST_CASE("structure serialization round-trips bit-identically") {
    const Supercell abc = build_stacked(3, 3, 2, Stacking::ABC);
    const std::string text = format_structure(abc);
    const Supercell back = parse_structure(text);
    CHECK(back == abc);
    CHECK(format_structure(back) == text);
}
