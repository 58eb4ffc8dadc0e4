#include <math.h>
#include <stdio.h>
#include "frit.h"

int main(void) {
    FritField *f = NULL, *tf = NULL;
    double norm = 0.0;
    if (frit_field_make(2, 16.0, 32, "gaussian_bump", NULL, &f) != FRIT_STATUS_OK) return 1;
    if (frit_apply_spectral(f, 1, 0.5, 8, &tf) != FRIT_STATUS_OK) return 2;
    if (frit_lq_norm(tf, 2.0, &norm) != FRIT_STATUS_OK || !(norm > 0.0) || !isfinite(norm)) return 3;
    if (frit_gamma_beta(2, 3.0, &norm) != FRIT_STATUS_INVALID_ARGUMENT || frit_last_error() == NULL) return 4;
    frit_field_free(tf);
    frit_field_free(f);
    printf("ok\n");
    return 0;
}
