#pragma once

#include "kawasaki/valley_id.hpp"

// Closed-form expressions assembled from elementary-chain quantities. They are
// an evaluation route independent of the generic limit solver and are used to
// cross-check it.
namespace kawasaki::closed {

struct GroundInputs {
    double q = 0;        // corner chain
    double r = 0;        // r+ + r-
    double r_minus = 0;
    double A_e1 = 0;     // p(w2+e1)
    double A_e2 = 0;     // p(w2+e2)
    double A1 = 0;       // p(right band of the quasi-square)
    double A2 = 0;       // p(top band of the quasi-square)
};
GroundInputs ground_inputs(int n, int L);

struct GroundMasses {
    double ground = 0;    // M1 = M2 on the square itself
    double m1_band = 0;   // M1 on the (2,2) corner band
    double m2_band = 0;   // M2 on the (2,2) corner band
};
GroundMasses ground_masses(int n, int L);

// Escape parameter of the (2,2) corner band. `detached_corner_term` is the
// constant attached to the last two neighbourhood configurations: 1/n follows
// from the hole gambler's ruin; the alternative 1/(n-1) is offered to compare.
double z_corner_band_22(int n, int L, double detached_corner_term);

// Escape parameter of the standing rectangle band on the bottom side.
double z_rect_band_s0(int n, int L);

// Escape parameter of a perimeter valley with the given side vector.
double z_perimeter(int n, Orientation a, const SideVector& v);

}  // namespace kawasaki::closed
