#include <stdio.h>
#include "fanbw.h"

int main(void) {
    /* 4-cycle */
    size_t edges[] = {0, 1, 1, 2, 2, 3, 3, 0};
    FanbwGraph *g = NULL;
    if (fanbw_graph_new(4, edges, 4, &g) != FANBW_STATUS_OK) {
        fprintf(stderr, "%s\n", fanbw_last_error());
        return 1;
    }
    size_t bw = 0;
    if (fanbw_exact_bandwidth(g, &bw) != FANBW_STATUS_OK) return 1;
    FanbwOptions opts = fanbw_options_default(2.0);
    FanbwCertificate *c = NULL;
    if (fanbw_certify(g, &opts, &c) != FANBW_STATUS_OK) {
        fprintf(stderr, "%s\n", fanbw_last_error());
        return 1;
    }
    printf("bw %zu verify %d\n", bw, (int)fanbw_verify(g, c));
    fanbw_certificate_free(c);
    fanbw_graph_free(g);
    return 0;
}
