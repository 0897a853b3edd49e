/* Minimal round trip over the C ABI: build the (3,3,3) base realization,
 * mutate a Farey triple alongside it, and print a small growth certificate.
 *
 * Build (from the workspace root):
 *   cargo build -p tubular-ffi --release
 *   cc crates/ffi/examples/demo.c -Icrates/ffi/include \
 *      target/release/libtubular_ffi.a -lm -o demo
 */
#include <stdio.h>
#include <stdint.h>
#include "tubular.h"

static void fail(const char *what) {
    char buf[256];
    tubular_last_error(buf, sizeof buf);
    fprintf(stderr, "%s: %s\n", what, buf);
}

int main(void) {
    printf("tubular %s\n", tubular_version());

    uint32_t weights[] = {3, 3, 3};
    TubularConfig *base = NULL;
    if (tubular_config_realize_base(weights, 3, &base) != TUBULAR_STATUS_OK) {
        fail("realize_base");
        return 1;
    }
    char *slopes = NULL;
    tubular_config_slope_set(base, &slopes);
    printf("base slopes: %s (rank additive: %d)\n", slopes,
           tubular_config_rank_additive(base));
    tubular_string_free(slopes);

    TubularTriple *t = NULL, *m = NULL;
    tubular_triple_parse("0/1,1/1,1/0", &t);
    tubular_triple_mutate(t, "1/0", &m);
    char *text = NULL;
    tubular_triple_format(m, &text);
    printf("triple after mutating at 1/0: %s\n", text);
    tubular_string_free(text);
    tubular_triple_free(t);
    tubular_triple_free(m);

    char *cert = NULL;
    if (tubular_growth_certificate(weights, 3, 2, &cert) != TUBULAR_STATUS_OK) {
        fail("growth_certificate");
        return 1;
    }
    printf("%s", cert);
    tubular_string_free(cert);
    tubular_config_free(base);
    return 0;
}
