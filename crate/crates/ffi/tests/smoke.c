#include <stdio.h>
#include <string.h>

#include "kinetic_lift.h"

int main(int argc, char **argv) {
    if (argc < 2) {
        return 10;
    }
    KlScenario *s = NULL;
    if (kl_scenario_load(argv[1], &s) != KL_STATUS_OK) {
        fprintf(stderr, "load: %s\n", kl_last_error_message());
        return 1;
    }
    if (kl_scenario_set_grid(s, 12, 0) != KL_STATUS_OK) {
        return 2;
    }
    KlField *f = NULL;
    if (kl_reference_run(s, 5, &f) != KL_STATUS_OK) {
        return 3;
    }
    size_t n = 0, nv = 0;
    kl_field_dims(f, &n, &nv);
    KlLiftSummary summary;
    memset(&summary, 0, sizeof summary);
    KlStatus st = kl_lift(s, f, NULL, &summary);
    if (st != KL_STATUS_OK) {
        fprintf(stderr, "lift: %s\n", kl_last_error_message());
        return 4;
    }
    if (kl_scenario_load(NULL, &s) != KL_STATUS_NULL_POINTER || kl_last_error_message() == NULL) {
        return 5;
    }
    printf("%zu %zu %.3e %.3e\n", n, nv, summary.error_lift, summary.error_equilibrium);
    kl_field_free(f);
    kl_scenario_free(s);
    return 0;
}
