#include <stdio.h>
#include <string.h>
#include "bigaction.h"

int main(void) {
    BaSession *s = NULL;
    if (ba_session_new(2, 1, 10, 0, NULL, &s) != BA_STATUS_USAGE || ba_last_error() == NULL) {
        return 10;
    }
    if (ba_session_new(3, 1, 10, 0, NULL, &s) != BA_STATUS_OK) {
        return 11;
    }
    BaUniformizer u;
    if (ba_uniformizer(s, &u) != BA_STATUS_OK || u.residual_valuation != 3402) {
        return 12;
    }
    uint64_t m = 0;
    if (ba_class_conductor(s, "w", &m) != BA_STATUS_OK || m != 308) {
        return 13;
    }
    char *g = NULL;
    if (ba_genus(s, &g) != BA_STATUS_OK || strcmp(g, "143210574") != 0) {
        return 14;
    }
    ba_string_free(g);
    int32_t big = -1;
    if (ba_big_action(s, &big) != BA_STATUS_OK || big != 0) {
        return 15;
    }
    ba_session_free(s);
    printf("ok %s\n", ba_version());
    return 0;
}
