#include <math.h>
#include <stdio.h>
#include <string.h>

#include "records.h"

#define CHECK(cond)                                              \
    do {                                                         \
        if (!(cond)) {                                           \
            fprintf(stderr, "failed: %s (line %d)\n", #cond, __LINE__); \
            return 1;                                            \
        }                                                        \
    } while (0)

int main(void) {
    double v = 0.0;
    uint64_t gaps[1] = {1};
    CHECK(rec_interrecord_pmf(gaps, 1, &v) == REC_STATUS_OK);
    CHECK(fabs(v - 0.5) < 1e-15);

    rec_dist *d = NULL;
    CHECK(rec_dist_new("exp:1", &d) == REC_STATUS_OK && d != NULL);
    CHECK(rec_record_value_pdf(d, 2, 1.0, &v) == REC_STATUS_OK);
    CHECK(fabs(v - exp(-1.0)) < 1e-14);
    CHECK(rec_discrete_record_pmf(d, 1, 1.0, &v) == REC_STATUS_UNSUPPORTED);
    CHECK(strlen(rec_last_error()) > 0);
    rec_dist_free(d);

    rec_dist *bad = NULL;
    CHECK(rec_dist_new("exp:-1", &bad) == REC_STATUS_INVALID_ARGUMENT);
    CHECK(bad == NULL);

    rec_extractor *e = NULL;
    CHECK(rec_extractor_new(REC_KIND_STRONG_UPPER, &e) == REC_STATUS_OK);
    double xs[5] = {3, 1, 4, 1, 5};
    uint64_t times[3];
    int found = 0;
    for (int i = 0; i < 5; i++) {
        int is_record = 0;
        rec_event ev;
        CHECK(rec_extractor_feed(e, xs[i], &is_record, &ev) == REC_STATUS_OK);
        if (is_record) times[found++] = ev.t;
    }
    CHECK(found == 3 && times[0] == 1 && times[1] == 3 && times[2] == 5);
    int is_record = 0;
    CHECK(rec_extractor_feed(e, NAN, &is_record, NULL) == REC_STATUS_INVALID_ARGUMENT);
    rec_extractor_free(e);

    printf("ok %s\n", rec_version());
    return 0;
}
