#include <stdio.h>
#include "predcut.h"

/* Two triangles joined by a light bridge (2,3). */
int main(void) {
    size_t us[] = {0, 1, 0, 3, 4, 3, 2};
    size_t vs[] = {1, 2, 2, 4, 5, 5, 3};
    double ws[] = {1, 1, 1, 1, 1, 1, 0.5};
    PcGraph *g = NULL;
    if (pc_graph_new(6, us, vs, ws, 7, &g) != PC_STATUS_OK) return 1;
    PcCut *cut = NULL;
    if (pc_stoer_wagner(g, &cut) != PC_STATUS_OK) return 2;
    size_t side[6];
    size_t len = pc_cut_side_len(cut);
    if (pc_cut_side(cut, side, 6) != PC_STATUS_OK) return 3;
    printf("weight=%g len=%zu first=%zu\n", pc_cut_weight(cut), len, side[0]);
    pc_cut_free(cut);

    PcGraph *bad = NULL;
    PcStatus st = pc_graph_new(1, NULL, NULL, NULL, 0, &bad);
    printf("status=%d error=%s\n", (int)st, pc_last_error());
    pc_graph_free(g);
    return st == PC_STATUS_INVALID_GRAPH && bad == NULL ? 0 : 4;
}
