#include <stdio.h>
#include "netsir.h"

int main(void) {
    const double ones[2] = {1.0, 1.0};
    const double x[2] = {0.85, 1.0};
    const double y[2] = {0.15, 0.0};
    NetsirParams *p = NULL;
    NetsirTrajectory *t = NULL;
    double phi = 0.0;
    NetsirShape shape = NETSIR_SHAPE_CONSTANT;

    if (netsir_params_new_rank_one(2, ones, ones, 1.0, &p) != NETSIR_STATUS_OK) {
        fprintf(stderr, "%s\n", netsir_last_error_message());
        return 1;
    }
    if (netsir_solve_phi(p, x, y, &phi) != NETSIR_STATUS_OK ||
        netsir_integrate(p, x, y, 40.0, NULL, &t) != NETSIR_STATUS_OK ||
        netsir_observed_shape(t, 0, &shape) != NETSIR_STATUS_OK) {
        fprintf(stderr, "%s\n", netsir_last_error_message());
        return 1;
    }
    printf("phi=%.6f shape=%d\n", phi, (int)shape);
    netsir_trajectory_free(t);
    netsir_params_free(p);
    return 0;
}
