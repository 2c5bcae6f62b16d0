#include <cstdio>

int main() {
    std::puts("bbolab: not wired up yet");
    return 1;
}
