#include <math.h>
#include <stdio.h>
#include <string.h>

#include "facdirac.h"

#define CHECK(cond)                                                      \
    do {                                                                 \
        if (!(cond)) {                                                   \
            const char *e = fd_last_error();                             \
            fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__,      \
                    #cond, e ? e : "no error");                          \
            return 1;                                                    \
        }                                                                \
    } while (0)

int main(void) {
    FdModel *m = NULL;
    CHECK(fd_model_new("trig_pt", &m) == FD_STATUS_OK);

    double e = 0;
    CHECK(fd_scalar_energy(m, 1, 2, &e) == FD_STATUS_OK);
    CHECK(fabs(e - 12.25) < 1e-12);

    FdSpectrumEntry spec[8];
    size_t n = 0;
    CHECK(fd_dirac_spectrum(m, 0, 2, spec, 2, &n) == FD_STATUS_BUFFER_TOO_SMALL);
    CHECK(n == 5);
    CHECK(fd_dirac_spectrum(m, 0, 2, spec, 8, &n) == FD_STATUS_OK);
    CHECK(spec[0].epsilon == -2.5 && spec[2].sign == 1 && spec[2].k == 0);

    FdGrid *g = NULL;
    CHECK(fd_grid_default(m, &g) == FD_STATUS_OK);
    size_t len = fd_grid_len(g);
    static double psi[4 * 2001];
    CHECK(len == 2001);
    CHECK(fd_eigenspinor(m, g, 1, 1, -1, psi, 4 * len) == FD_STATUS_OK);

    CHECK(fd_model_new("morse", &m) == FD_STATUS_INVALID_ARGUMENT);
    CHECK(strstr(fd_last_error(), "morse") != NULL);

    char *report = NULL;
    size_t failed = 99;
    CHECK(fd_verify_json("{\"model_id\":\"trig_pt\",\"n\":1,\"k_max\":2,\"checks\":[\"ladder\"]}", 42, &report, &failed) == FD_STATUS_OK);
    CHECK(failed == 0 && strstr(report, "\"ladder\"") != NULL);
    fd_string_free(report);

    fd_grid_free(g);
    fd_model_free(m);
    printf("ok %s\n", fd_version());
    return 0;
}
