"""探索の上限などの設定値"""
from dataclasses import dataclass


@dataclass(frozen=True)
class Budget:
    """各ソルバが使う探索上限

    Attributes
    ----------
    oracle_length: int
        書き換えオラクル・自由簡約オラクルが扱う語長の上限
    oracle_states: int
        書き換えオラクルが訪問する語の数の上限
    max_len: int
        総当たり探索で扱う実行の語長の上限
    search_states: int
        総当たり探索で保持する状態数の上限
    max_tests: int
        NPソルバが評価するテストの数の上限
    fra_memo: int
        1つのテストについて自由簡約探索が訪問する状態数の上限
    counter_cap: int
        頂点消去で使うカウンタ上限の最大値
    """

    oracle_length: int = 12
    oracle_states: int = 10 ** 6
    max_len: int = 12
    search_states: int = 10 ** 6
    max_tests: int = 10 ** 7
    fra_memo: int = 10 ** 6
    counter_cap: int = 32


DEFAULT_BUDGET = Budget()
