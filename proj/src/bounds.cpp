#include "billiards/constructions.hpp"

namespace billiards {

std::pair<mpz_class, mpz_class> upper_bounds(int n) {
    if (n < 2) throw Error(ErrorKind::BadN, "upper bounds need n >= 2");
    const unsigned long nn = static_cast<unsigned long>(n);
    // (32 n^{3/2})^{n^2} = sqrt(32^{2n^2} n^{3n^2})
    mpz_class a, b, radicand, root;
    mpz_ui_pow_ui(a.get_mpz_t(), 32, 2 * nn * nn);
    mpz_ui_pow_ui(b.get_mpz_t(), nn, 3 * nn * nn);
    radicand = a * b;
    mpz_sqrt(root.get_mpz_t(), radicand.get_mpz_t());
    if (root * root != radicand) root += 1;

    mpz_class second;
    mpz_ui_pow_ui(second.get_mpz_t(), 400 * nn * nn, 2 * nn * nn * nn * nn);
    return {root, second};
}

} // namespace billiards
