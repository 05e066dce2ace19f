#include <stdio.h>
#include <string.h>
#include "hhorder.h"

#define CHECK(cond) do { if (!(cond)) { fprintf(stderr, "failed: %s (%s)\n", #cond, hho_last_error_message()); return 1; } } while (0)

int main(void) {
    HhoWeight *t4 = NULL, *mid = NULL;
    CHECK(hho_weight_from_spec("T:a=4", &t4) == HHO_STATUS_OK);
    CHECK(hho_weight_from_spec("midpoint", &mid) == HHO_STATUS_OK);

    HhoRelation rel;
    CHECK(hho_compare(t4, mid, &rel) == HHO_STATUS_OK);
    CHECK(rel == HHO_RELATION_INCOMPARABLE);

    char *gap = NULL;
    CHECK(hho_hinge_gap(t4, mid, "1/4", &gap) == HHO_STATUS_OK);
    CHECK(strcmp(gap, "1/96") == 0);
    hho_string_free(gap);

    HhoWeight *bad = NULL;
    CHECK(hho_weight_from_spec("T:a=x", &bad) == HHO_STATUS_PARSE);
    CHECK(strlen(hho_last_error_message()) > 0);

    hho_weight_free(t4);
    hho_weight_free(mid);
    printf("ok %s\n", hho_version());
    return 0;
}
